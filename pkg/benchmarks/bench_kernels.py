"""Benchmark the numba kernels against their numpy/python fallbacks.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Covers the two hot paths: the fused per-matrix invariant evaluation used
by ensemble averaging and Monte Carlo checks, and windowed co-occurrence
counting over an encoded corpus.  The fallback path is what you get with
LINGMAT_NUMBA=0.
"""

import time

import numpy as np

from lingmat import _kernels


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_catalog():
    print("catalog invariants (all 19 per matrix, batch of N matrices)")
    print(f"{'D':>6} {'N':>6} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(0)
    for d, n in ((30, 2000), (100, 300), (400, 20)):
        mats = [rng.normal(size=(d, d)) for _ in range(n)]
        if _kernels.HAVE_NUMBA:
            _kernels.catalog_values_numba(mats[0], True)  # warm the JIT

        def run_numpy():
            for m in mats:
                _kernels.catalog_values_numpy(m, True)

        t_np = timeit(run_numpy, repeat=3)
        if _kernels.HAVE_NUMBA:
            def run_numba():
                for m in mats:
                    _kernels.catalog_values_numba(m, True)

            t_nb = timeit(run_numba, repeat=3)
            print(f"{d:>6} {n:>6} {t_np:>11.4f}s {t_nb:>11.4f}s {t_np / t_nb:>8.1f}x")
        else:
            print(f"{d:>6} {n:>6} {t_np:>11.4f}s {'n/a':>12} {'':>9}")


def bench_window_counts():
    print("\nwindowed co-occurrence counting (tokens, window 5)")
    print(f"{'tokens':>9} {'python':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(1)
    for n_tokens in (50_000, 200_000):
        n_sent = n_tokens // 12
        tid = rng.integers(-1, 40, size=n_tokens).astype(np.int64)
        cid = rng.integers(-1, 100, size=n_tokens).astype(np.int64)
        offsets = np.arange(0, n_sent + 1, dtype=np.int64) * 12
        args = (tid[: offsets[-1]], cid[: offsets[-1]], offsets, 5, 40, 100)
        if _kernels.HAVE_NUMBA:
            _kernels.window_pair_counts_numba(*args)  # warm the JIT
        t_py = timeit(_kernels.window_pair_counts_python, *args, repeat=3)
        if _kernels.HAVE_NUMBA:
            t_nb = timeit(_kernels.window_pair_counts_numba, *args, repeat=3)
            print(f"{offsets[-1]:>9} {t_py:>11.4f}s {t_nb:>11.4f}s {t_py / t_nb:>8.1f}x")
        else:
            print(f"{offsets[-1]:>9} {t_py:>11.4f}s {'n/a':>12} {'':>9}")


if __name__ == "__main__":
    print(f"active backend: {_kernels.BACKEND} "
          f"(numba available: {_kernels.HAVE_NUMBA})\n")
    bench_catalog()
    bench_window_counts()
