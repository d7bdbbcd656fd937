"""Permutation-invariant polynomial observables on matrices and ensembles.

The fixed catalog holds the 19 invariants used by the model: two linear,
eleven quadratic, three cubic, three quartic.  Every multi-index sum is
restricted to pairwise-distinct indices; a dimension too small to supply
the indices makes the sum empty, never an error.  A generic evaluator over
directed multigraphs provides brute-force semantics for small dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels
from .matrix_core import Ensemble, WordMatrix

#: Catalog tags, in fixed order.  Md*/Mo* are the diagonal/off-diagonal
#: power sums; Q* are the remaining quadratic invariants (mixed products,
#: chains, stars, and the fully disconnected pair).
CATALOG = _kernels.CATALOG_ORDER

#: The eleven degree-2 invariants, in the canonical quadratic order.
QUADRATIC_TAGS = (
    "Md2", "Mo21", "Mo22", "Qdd", "Qdio", "Qoid",
    "Qchain", "Qout", "Qin", "Qodiag", "Qdisc",
)

#: Polynomial degree per tag.
DEGREE = {
    "Md1": 1, "Mo1": 1,
    "Md2": 2, "Mo21": 2, "Mo22": 2, "Qdd": 2, "Qdio": 2, "Qoid": 2,
    "Qchain": 2, "Qout": 2, "Qin": 2, "Qodiag": 2, "Qdisc": 2,
    "Md3": 3, "Mo31": 3, "Mo32": 3,
    "Md4": 4, "Mo41": 4, "Mo42": 4,
}

#: Number of distinct summation indices per tag (sums vanish below this).
INDEX_COUNT = {
    "Md1": 1, "Mo1": 2, "Md2": 1, "Mo21": 2, "Mo22": 2,
    "Qdd": 2, "Qdio": 2, "Qoid": 2,
    "Qchain": 3, "Qout": 3, "Qin": 3, "Qodiag": 3, "Qdisc": 4,
    "Md3": 1, "Mo31": 2, "Mo32": 3, "Md4": 1, "Mo41": 2, "Mo42": 4,
}

_IDX = _kernels.CATALOG_INDEX


def _values_of(m) -> np.ndarray:
    if isinstance(m, WordMatrix):
        return m.values
    return np.ascontiguousarray(m, dtype=np.float64)


def validate_tag(tag: str) -> str:
    if tag not in _IDX:
        raise KeyError(f"unknown invariant tag {tag!r}; catalog: {', '.join(CATALOG)}")
    return tag


def eval_invariant(tag: str, m) -> float:
    """Value of one catalog invariant on a matrix.

    Cost is O(D^2) except for Mo32 and Mo42, which take one dense matrix
    product.
    """
    validate_tag(tag)
    v = _values_of(m)
    with_cycles = tag in _kernels.CYCLE_TAGS
    return float(_kernels.catalog_values(v, with_cycles)[_IDX[tag]])


def eval_all(m, tags=CATALOG) -> dict[str, float]:
    """All requested catalog invariants of one matrix in a single pass."""
    for t in tags:
        validate_tag(t)
    v = _values_of(m)
    with_cycles = any(t in _kernels.CYCLE_TAGS for t in tags)
    vec = _kernels.catalog_values(v, with_cycles)
    return {t: float(vec[_IDX[t]]) for t in tags}


@dataclass(frozen=True, eq=False)
class GraphInvariant:
    """A directed multigraph; loops and repeated edges allowed.

    The associated invariant sums, over all injective assignments of
    vertices to basis indices, the product of the matrix entries picked
    out by the edges.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        if self.vertex_count < 1:
            raise ValueError("graph needs at least one vertex")
        if not edges:
            raise ValueError("graph needs at least one edge")
        touched = set()
        for u, v in edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u},{v}) out of range for {self.vertex_count} vertices")
            touched.add(u)
            touched.add(v)
        if len(touched) != self.vertex_count:
            raise ValueError("graph has isolated vertices")
        object.__setattr__(self, "edges", edges)

    @property
    def degree(self) -> int:
        return len(self.edges)


def eval_graph_invariant(g: GraphInvariant, m) -> float:
    """Brute-force evaluation over injective vertex assignments.

    Intended as an oracle for D up to ~10; fewer basis indices than
    vertices gives an empty sum (0).
    """
    from itertools import permutations

    v = _values_of(m)
    d = v.shape[0]
    if d < g.vertex_count:
        return 0.0
    total = 0.0
    for phi in permutations(range(d), g.vertex_count):
        prod = 1.0
        for a, b in g.edges:
            prod *= v[phi[a], phi[b]]
        total += prod
    return total


@dataclass(frozen=True, eq=False)
class EnsembleAverages:
    """Per-invariant arithmetic means over an ensemble."""

    dim: int
    count: int
    values: dict[str, float]

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "count": self.count,
                "values": {t: self.values[t] for t in sorted(self.values)}}

    @classmethod
    def from_json_dict(cls, obj) -> "EnsembleAverages":
        for key in ("dim", "count", "values"):
            if key not in obj:
                raise ValueError(f"ensemble averages JSON missing {key!r}")
        values = {validate_tag(t): float(x) for t, x in obj["values"].items()}
        return cls(dim=int(obj["dim"]), count=int(obj["count"]), values=values)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def ensemble_averages(ensemble: Ensemble, tags=CATALOG, threads: int | None = None) -> EnsembleAverages:
    """Mean of each invariant over the members, in member (manifest) order.

    Member evaluations may run concurrently, but the reduction is a fixed
    ordered summation so output is bit-reproducible for any thread count.
    """
    tags = tuple(tags)
    for t in tags:
        validate_tag(t)
    with_cycles = any(t in _kernels.CYCLE_TAGS for t in tags)

    def one(member):
        return _kernels.catalog_values(member.values, with_cycles)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, ensemble.members))
    else:
        rows = [one(member) for member in ensemble.members]
    table = np.vstack(rows)
    means = table.sum(axis=0) / len(ensemble)
    values = {t: float(means[_IDX[t]]) for t in tags}
    return EnsembleAverages(dim=ensemble.dim, count=len(ensemble), values=values)


@dataclass(frozen=True, eq=False)
class Histogram:
    """Equal-width bins over [min, max] of the observed values."""

    edges: np.ndarray
    counts: np.ndarray

    def to_csv(self) -> str:
        lines = ["bin_low,bin_high,count"]
        for k in range(len(self.counts)):
            lines.append(f"{self.edges[k]!r},{self.edges[k + 1]!r},{int(self.counts[k])}")
        return "\n".join(lines) + "\n"


def element_histogram(ensemble: Ensemble, i: int, j: int, bin_count: int) -> Histogram:
    """Distribution of entry (i, j) across the ensemble members.

    Bins span [min, max] closed on both ends; counts sum to the ensemble
    size.  A degenerate min == max collapses to a single bin.
    """
    d = ensemble.dim
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"entry ({i},{j}) out of range for dimension {d}")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    vals = np.array([m.values[i, j] for m in ensemble.members])
    lo = float(vals.min())
    hi = float(vals.max())
    if lo == hi:
        return Histogram(edges=np.array([lo, hi]), counts=np.array([vals.size]))
    counts, edges = np.histogram(vals, bins=bin_count, range=(lo, hi))
    return Histogram(edges=edges, counts=counts)
