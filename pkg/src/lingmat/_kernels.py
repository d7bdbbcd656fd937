"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

Two kernel families live here: the per-matrix evaluation of the fixed
catalog of permutation-invariant polynomials, and windowed co-occurrence
pair counting over an encoded corpus.  The jitted path is used by default
when numba imports; set ``LINGMAT_NUMBA=0`` to force the numpy/python
fallback (a performance toggle only -- results may differ in the last few
floating-point ulps because summation order differs between the paths).

``benchmarks/bench_kernels.py`` compares both implementations.
"""

import os

import numpy as np

_flag = os.environ.get("LINGMAT_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "off", "no")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = NUMBA_REQUESTED and HAVE_NUMBA

#: Fixed catalog order shared with :mod:`lingmat.invariants`.
CATALOG_ORDER = (
    "Md1", "Mo1", "Md2", "Mo21", "Mo22",
    "Qdd", "Qdio", "Qoid", "Qchain", "Qout", "Qin", "Qodiag", "Qdisc",
    "Md3", "Mo31", "Mo32", "Md4", "Mo41", "Mo42",
)

CATALOG_INDEX = {tag: i for i, tag in enumerate(CATALOG_ORDER)}

#: Tags whose evaluation needs one dense matrix product (O(D^3)); every
#: other catalog entry costs O(D^2).
CYCLE_TAGS = ("Mo32", "Mo42")


def catalog_values_numpy(m, with_cycles=True):
    """All 19 catalog invariants of one matrix, as a vector in CATALOG_ORDER.

    Restricted sums over pairwise-distinct indices are expanded by
    inclusion-exclusion over index-coincidence patterns into unrestricted
    contractions.  When ``with_cycles`` is false the two entries that need
    a matrix product (Mo32, Mo42) are left at 0 and must not be read.
    """
    d = np.ascontiguousarray(np.diag(m))
    t1 = d.sum()
    q2 = (d * d).sum()
    q3 = (d * d * d).sum()
    q4 = (d * d * d * d).sum()
    s = m.sum()
    m2e = m * m
    f2 = m2e.sum()
    f3 = (m2e * m).sum()
    f4 = (m2e * m2e).sum()
    r = m.sum(axis=1)
    c = m.sum(axis=0)
    mt = m * m.T  # (i,j) -> M_ij * M_ji
    tr2 = mt.sum()
    dr = d @ r
    dc = d @ c
    cr = c @ r
    rr = (r * r).sum()
    cc = (c * c).sum()
    g = mt.sum(axis=1)  # g_i = sum_j M_ij M_ji = (M^2)_ii
    dg2 = d @ g
    sg2 = (g * g).sum()
    dg = (d * d) @ g
    h = d @ mt @ d
    f22 = (mt * mt).sum()

    out = np.zeros(19)
    out[0] = t1
    out[1] = s - t1
    out[2] = q2
    out[3] = f2 - q2
    out[4] = tr2 - q2
    out[5] = t1 * t1 - q2
    out[6] = dr - q2
    out[7] = dc - q2
    out[8] = cr - dr - dc - tr2 + 2.0 * q2
    out[9] = rr - 2.0 * dr - f2 + 2.0 * q2
    out[10] = cc - 2.0 * dc - f2 + 2.0 * q2
    out[11] = s * t1 - t1 * t1 - dr - dc + 2.0 * q2
    out[12] = (s * s - 2.0 * s * t1 - rr - cc - 2.0 * cr
               + t1 * t1 + f2 + tr2 + 4.0 * dr + 4.0 * dc - 6.0 * q2)
    out[13] = q3
    out[14] = f3 - q3
    out[16] = q4
    out[17] = f4 - q4
    if with_cycles:
        mm = m @ m
        tr3 = (mm * m.T).sum()
        tr4 = (mm * mm.T).sum()
        d3 = (mm * m.T).sum(axis=1)  # diag(M^3)
        dm3 = d @ d3
        out[15] = tr3 - 3.0 * dg2 + 2.0 * q3
        out[18] = (tr4 - 4.0 * dm3 - 2.0 * sg2 + 2.0 * h + f22
                   + 8.0 * dg - 6.0 * q4)
    return out


@njit(cache=True, nogil=True)
def _catalog_values_jit(m, with_cycles):
    n = m.shape[0]
    t1 = 0.0
    q2 = 0.0
    q3 = 0.0
    q4 = 0.0
    for i in range(n):
        v = m[i, i]
        t1 += v
        q2 += v * v
        q3 += v * v * v
        q4 += v * v * v * v
    s = 0.0
    f2 = 0.0
    f3 = 0.0
    f4 = 0.0
    tr2 = 0.0
    rr = 0.0
    cc = 0.0
    dr = 0.0
    dc = 0.0
    cr = 0.0
    dg2 = 0.0
    sg2 = 0.0
    dg = 0.0
    h = 0.0
    f22 = 0.0
    r = np.zeros(n)
    c = np.zeros(n)
    g = np.zeros(n)
    for i in range(n):
        for j in range(n):
            v = m[i, j]
            w = m[j, i]
            s += v
            f2 += v * v
            f3 += v * v * v
            f4 += v * v * v * v
            tr2 += v * w
            f22 += v * v * w * w
            h += m[i, i] * m[j, j] * v * w
            r[i] += v
            c[j] += v
            g[i] += v * w
    for i in range(n):
        rr += r[i] * r[i]
        cc += c[i] * c[i]
        dr += m[i, i] * r[i]
        dc += m[i, i] * c[i]
        cr += c[i] * r[i]
        dg2 += m[i, i] * g[i]
        sg2 += g[i] * g[i]
        dg += m[i, i] * m[i, i] * g[i]

    out = np.zeros(19)
    out[0] = t1
    out[1] = s - t1
    out[2] = q2
    out[3] = f2 - q2
    out[4] = tr2 - q2
    out[5] = t1 * t1 - q2
    out[6] = dr - q2
    out[7] = dc - q2
    out[8] = cr - dr - dc - tr2 + 2.0 * q2
    out[9] = rr - 2.0 * dr - f2 + 2.0 * q2
    out[10] = cc - 2.0 * dc - f2 + 2.0 * q2
    out[11] = s * t1 - t1 * t1 - dr - dc + 2.0 * q2
    out[12] = (s * s - 2.0 * s * t1 - rr - cc - 2.0 * cr
               + t1 * t1 + f2 + tr2 + 4.0 * dr + 4.0 * dc - 6.0 * q2)
    out[13] = q3
    out[14] = f3 - q3
    out[16] = q4
    out[17] = f4 - q4
    if with_cycles:
        mm = np.dot(m, m)
        tr3 = 0.0
        tr4 = 0.0
        dm3 = 0.0
        for i in range(n):
            d3i = 0.0
            for j in range(n):
                tr3 += mm[i, j] * m[j, i]
                tr4 += mm[i, j] * mm[j, i]
                d3i += mm[i, j] * m[j, i]
            dm3 += m[i, i] * d3i
        out[15] = tr3 - 3.0 * dg2 + 2.0 * q3
        out[18] = (tr4 - 4.0 * dm3 - 2.0 * sg2 + 2.0 * h + f22
                   + 8.0 * dg - 6.0 * q4)
    return out


def catalog_values_numba(m, with_cycles=True):
    return _catalog_values_jit(m, with_cycles)


def window_pair_counts_python(tid, cid, offsets, window, n_targets, n_contexts):
    """Co-occurrence counts between targets and contexts inside sentences.

    ``tid``/``cid`` hold, per corpus position, a target- respectively
    context-index or -1.  ``offsets`` delimits sentences.  A pair is
    counted for every (target position, context position) within distance
    ``window`` in the same sentence; a position never pairs with itself.
    """
    counts = np.zeros((n_targets, n_contexts), dtype=np.int64)
    for k in range(len(offsets) - 1):
        lo = offsets[k]
        hi = offsets[k + 1]
        for i in range(lo, hi):
            ti = tid[i]
            if ti < 0:
                continue
            jlo = i - window
            if jlo < lo:
                jlo = lo
            jhi = i + window
            if jhi >= hi:
                jhi = hi - 1
            for j in range(jlo, jhi + 1):
                if j == i:
                    continue
                cj = cid[j]
                if cj >= 0:
                    counts[ti, cj] += 1
    return counts


_window_pair_counts_jit = njit(cache=True, nogil=True)(window_pair_counts_python)


def window_pair_counts_numba(tid, cid, offsets, window, n_targets, n_contexts):
    return _window_pair_counts_jit(tid, cid, offsets, np.int64(window),
                                   np.int64(n_targets), np.int64(n_contexts))


if USE_NUMBA:
    catalog_values = catalog_values_numba
    window_pair_counts = window_pair_counts_numba
else:
    catalog_values = catalog_values_numpy
    window_pair_counts = window_pair_counts_python

BACKEND = "numba" if USE_NUMBA else "numpy"
