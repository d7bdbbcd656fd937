"""End-to-end pipeline: corpus -> vectors -> dataset -> matrices ->
observables -> fit -> report, with a dimension sweep.

Every stage writes its outputs as files and can be re-run independently
through the CLI; a run with identical config and seed is byte-identical
regardless of the worker-thread count (per-word work is pure, results are
reduced in a fixed order, and no artifact records timing or thread
information).  On failure a FAILED marker naming the stage is left next
to the partial outputs.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .corpus import (
    DatasetSelection,
    Thresholds,
    build_compound_vectors,
    build_noun_vectors,
    build_vocab,
    count_cooccurrence,
    pos_class_of,
    read_corpus,
    read_pairs,
    select_basis,
    select_dataset,
    write_basis,
    write_vectors_dir,
)
from .gauss import GaussParams, fit, moment_report
from .invariants import CATALOG, EnsembleAverages, ensemble_averages
from .matrix_core import Ensemble, write_ensemble
from .regression import (
    RegressionConfig,
    TrainingSet,
    fit_closed_form_logged,
    fit_gradient_descent_logged,
)

STAGES = ("build-vectors", "select-dataset", "learn-matrices",
          "observables", "fit", "report")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str
    pairs: str
    out_dir: str
    basis_sizes: tuple[int, ...] = (60, 80, 100)
    window: int = 5
    thresholds: Thresholds = field(default_factory=Thresholds)
    regression: RegressionConfig = field(default_factory=RegressionConfig)
    regression_method: str = "closed_form"   # or "gradient_descent"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        sizes = tuple(int(d) for d in self.basis_sizes)
        if not sizes:
            raise ValueError("at least one basis size is required")
        if any(d < 4 for d in sizes):
            raise ValueError(
                f"basis sizes must be >= 4 so all quadratic invariants are "
                f"nontrivial, got {sizes}"
            )
        if len(set(sizes)) != len(sizes):
            raise ValueError("basis sizes must be distinct")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.regression_method not in ("closed_form", "gradient_descent"):
            raise ValueError(f"unknown regression method {self.regression_method!r}")
        object.__setattr__(self, "basis_sizes", sizes)

    def validate_paths(self):
        for label, path in (("corpus", self.corpus), ("pairs", self.pairs)):
            if not os.path.exists(path):
                raise FileNotFoundError(f"{label} file does not exist: {path}")

    def semantic_dict(self) -> dict:
        """The part of the config that determines outputs (no out_dir or
        threads, which must not change any produced bytes)."""
        reg = {"lambda": self.regression.ridge_lambda,
               "learning_rate": self.regression.learning_rate,
               "max_epochs": self.regression.max_epochs,
               "convergence_tol": self.regression.convergence_tol,
               "method": self.regression_method}
        return {"corpus": self.corpus, "pairs": self.pairs,
                "basis_sizes": list(self.basis_sizes), "window": self.window,
                "thresholds": self.thresholds.to_json_dict(),
                "regression": reg, "seed": self.seed}

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def provenance(self) -> dict:
        return {"tool": "lingmat", "version": __version__,
                "config_hash": self.config_hash(), "seed": self.seed}

    @classmethod
    def from_json_dict(cls, obj, out_dir=None, threads=None) -> "PipelineConfig":
        known = {"corpus", "pairs", "out_dir", "basis_sizes", "basis_size",
                 "window", "thresholds", "regression", "seed", "threads"}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown pipeline config keys: {sorted(unknown)}")
        reg_obj = dict(obj.get("regression", {}))
        method = reg_obj.pop("method", "closed_form")
        lam = reg_obj.pop("lambda", None)
        reg = RegressionConfig(
            ridge_lambda=None if lam is None else float(lam),
            learning_rate=float(reg_obj.pop("learning_rate", 0.01)),
            max_epochs=int(reg_obj.pop("max_epochs", 5000)),
            convergence_tol=float(reg_obj.pop("convergence_tol", 1e-8)),
            seed=int(obj.get("seed", 0)),
        )
        if reg_obj:
            raise ValueError(f"unknown regression config keys: {sorted(reg_obj)}")
        sizes = obj.get("basis_sizes")
        if sizes is None and "basis_size" in obj:
            sizes = [obj["basis_size"]]
        if sizes is None:
            sizes = (60, 80, 100)
        return cls(
            corpus=obj["corpus"],
            pairs=obj["pairs"],
            out_dir=out_dir if out_dir is not None else obj.get("out_dir", "out"),
            basis_sizes=tuple(int(d) for d in sizes),
            window=int(obj.get("window", 5)),
            thresholds=Thresholds.from_json_dict(obj.get("thresholds", {})),
            regression=reg,
            regression_method=method,
            seed=int(obj.get("seed", 0)),
            threads=threads if threads is not None else int(obj.get("threads", 1)),
        )


def write_json(obj, path, provenance=None) -> None:
    if provenance is not None:
        obj = dict(obj)
        obj["provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def provenance_comment(provenance) -> str:
    return (f"# lingmat {provenance['version']} "
            f"config={provenance['config_hash']} seed={provenance['seed']}\n")


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def stage_build_vectors(corpus_path, pairs_path, basis_size, window, out_dir,
                        provenance=None):
    """Basis, noun vectors, and compound vectors for every pairs-file entry.

    Vectors are built at the largest requested basis size; smaller sweep
    dimensions reuse prefixes of the same vectors because the basis is
    frequency-ordered and PPMI is pointwise.
    """
    corpus = read_corpus(corpus_path)
    pairs = read_pairs(pairs_path)
    vocab = build_vocab(corpus)
    basis = select_basis(vocab, corpus, basis_size)

    nouns = sorted({arg for args in pairs.values() for arg in args})
    table = count_cooccurrence(corpus, nouns, basis, window)
    noun_vectors = build_noun_vectors(table, basis, nouns)

    compound_vectors = []
    skipped: dict[str, list[str]] = {}
    for head in sorted(pairs):
        pos_class = pos_class_of(head, corpus)
        vecs, missing = build_compound_vectors(
            corpus, table, basis, head, sorted(pairs[head]), pos_class, window)
        compound_vectors.extend(vecs)
        if missing:
            skipped[head] = missing

    os.makedirs(out_dir, exist_ok=True)
    header = provenance_comment(provenance) if provenance is not None else None
    write_basis(basis, os.path.join(out_dir, "basis.txt"), header=header)
    write_vectors_dir(noun_vectors, os.path.join(out_dir, "nouns"))
    write_vectors_dir(compound_vectors, os.path.join(out_dir, "compounds"))
    write_json({"skipped_compounds": skipped}, os.path.join(out_dir, "warnings.json"),
               provenance)
    if provenance is not None:
        write_json({}, os.path.join(out_dir, "provenance.json"), provenance)
    return basis, noun_vectors, compound_vectors


def stage_select_dataset(corpus_path, pairs_path, thresholds, out_path,
                         provenance=None) -> DatasetSelection:
    corpus = read_corpus(corpus_path)
    pairs = read_pairs(pairs_path)
    selection = select_dataset(corpus, pairs, thresholds)
    write_json(selection.to_json_dict(), out_path, provenance)
    return selection


def stage_learn_matrices(selection: DatasetSelection, noun_vectors, compound_vectors,
                         dim: int, reg: RegressionConfig, method: str, out_dir,
                         threads: int = 1, provenance=None) -> Ensemble:
    """One ridge regression per selected target at the given dimension."""
    nouns = {v.word: v for v in noun_vectors}
    compounds = {v.word: v for v in compound_vectors}

    def one(entry):
        rows_x = []
        rows_y = []
        used = []
        for noun, _cnt in entry.args:
            key = f"{entry.word} {noun}"
            if noun in nouns and key in compounds:
                rows_x.append(nouns[noun].values[:dim])
                rows_y.append(compounds[key].values[:dim])
                used.append(noun)
        if not rows_x:
            raise ValueError(f"target {entry.word!r} has no usable argument vectors")
        ts = TrainingSet(entry.word, np.vstack(rows_x), np.vstack(rows_y))
        if method == "gradient_descent":
            matrix, log = fit_gradient_descent_logged(ts, reg)
        else:
            matrix, log = fit_closed_form_logged(ts, reg)
        log["rows"] = len(used)
        return matrix, log

    entries = selection.entries
    if not entries:
        raise ValueError("dataset selection is empty; relax the thresholds")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, entries))
    else:
        results = [one(e) for e in entries]

    ensemble = Ensemble(tuple(m for m, _ in results))
    write_ensemble(ensemble, out_dir)
    logs = {e.word: log for e, (_, log) in zip(entries, results)}
    write_json({"dim": dim, "words": logs},
               os.path.join(out_dir, "training_log.json"), provenance)
    return ensemble


def stage_observables(ensemble: Ensemble, out_path, threads: int = 1,
                      provenance=None) -> EnsembleAverages:
    avgs = ensemble_averages(ensemble, CATALOG, threads=threads)
    write_json(avgs.to_json_dict(), out_path, provenance)
    return avgs


def stage_fit(avgs: EnsembleAverages, out_path, provenance=None) -> GaussParams:
    params = fit(avgs)
    write_json(params.to_json_dict(), out_path, provenance)
    return params


def stage_report(params: GaussParams, ensemble: Ensemble, out_path,
                 threads: int = 1, provenance=None):
    report = moment_report(params, ensemble, threads=threads)
    write_json(report.to_json_dict(), out_path, provenance)
    with open(os.path.splitext(out_path)[0] + ".txt", "w", encoding="utf-8") as fh:
        if provenance is not None:
            fh.write(provenance_comment(provenance))
        fh.write(report.to_text())
    return report


NORMALIZED_KEYS = ("j0_over_D", "lambda_over_D2", "js_over_D",
                   "a_over_D2", "b_over_D2")


def sweep_csv(params_by_dim: dict[int, GaussParams], provenance=None) -> str:
    lines = []
    if provenance is not None:
        lines.append(provenance_comment(provenance).rstrip("\n"))
    lines.append("D," + ",".join(NORMALIZED_KEYS))
    for d in sorted(params_by_dim):
        norm = params_by_dim[d].normalized()
        lines.append(f"{d}," + ",".join(repr(norm[k]) for k in NORMALIZED_KEYS))
    return "\n".join(lines) + "\n"


def sweep_stability(params_by_dim: dict[int, GaussParams]) -> dict[str, float]:
    """Relative spread (max-min over mean) of each normalized parameter."""
    out = {}
    for key in NORMALIZED_KEYS:
        vals = np.array([params_by_dim[d].normalized()[key]
                         for d in sorted(params_by_dim)])
        mean = vals.mean()
        out[key] = float((vals.max() - vals.min()) / abs(mean)) if mean != 0 else float("inf")
    return out


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute all stages; returns the summary report dict."""
    config.validate_paths()
    out = config.out_dir
    os.makedirs(out, exist_ok=True)
    marker = os.path.join(out, "FAILED")
    if os.path.exists(marker):
        os.remove(marker)
    prov = config.provenance()

    stage = STAGES[0]
    try:
        basis_max = max(config.basis_sizes)
        vec_dir = os.path.join(out, "vectors")
        basis, noun_vecs, compound_vecs = stage_build_vectors(
            config.corpus, config.pairs, basis_max, config.window, vec_dir,
            provenance=prov)

        stage = "select-dataset"
        selection = stage_select_dataset(
            config.corpus, config.pairs, config.thresholds,
            os.path.join(out, "selection.json"), provenance=prov)

        params_by_dim: dict[int, GaussParams] = {}
        reports = {}
        for dim in config.basis_sizes:
            tag = f"D{dim:03d}"
            ddir = os.path.join(out, tag)
            os.makedirs(ddir, exist_ok=True)

            stage = "learn-matrices"
            ensemble = stage_learn_matrices(
                selection, noun_vecs, compound_vecs, dim, config.regression,
                config.regression_method, os.path.join(ddir, "matrices"),
                threads=config.threads, provenance=prov)

            stage = "observables"
            avgs = stage_observables(ensemble, os.path.join(ddir, "averages.json"),
                                     threads=config.threads, provenance=prov)

            stage = "fit"
            params = stage_fit(avgs, os.path.join(ddir, "params.json"),
                               provenance=prov)
            params_by_dim[dim] = params

            stage = "report"
            report = stage_report(params, ensemble,
                                  os.path.join(ddir, "report.json"),
                                  threads=config.threads, provenance=prov)
            reports[tag] = report.to_json_dict()

        stage = "report"
        with open(os.path.join(out, "sweep.csv"), "w", encoding="utf-8") as fh:
            fh.write(sweep_csv(params_by_dim, prov))
        summary = {
            "config": config.semantic_dict(),
            "selection_size": len(selection.entries),
            "dims": sorted(params_by_dim),
            "params": {f"D{d:03d}": params_by_dim[d].to_json_dict()
                       for d in params_by_dim},
            "sweep_stability": sweep_stability(params_by_dim),
            "reports": reports,
        }
        write_json(summary, os.path.join(out, "report.json"), prov)
        return summary
    except Exception as exc:
        with open(marker, "w", encoding="utf-8") as fh:
            fh.write(f"stage: {stage}\nerror: {exc}\n")
        raise PipelineError(stage, exc) from exc
