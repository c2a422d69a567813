"""Benchmark the compiled kernels against the numpy reference.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the three hot kernels (Gini split scan, gradient split scan,
pairwise squared distances) on a few sizes and prints a table with the
speedup of the compiled extension over the pure-numpy path.
"""

import argparse
import time

import numpy as np

from chitin._kernels import py_ref

try:
    from chitin._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_case(name, make_args, call, repeats):
    args = make_args()
    t_py = timeit(lambda: call(py_ref, *args), repeats)
    if _core is not None:
        t_ext = timeit(lambda: call(_core, *args), repeats)
        ratio = f"{t_py / t_ext:6.2f}x"
        ext_ms = f"{t_ext * 1e3:9.3f}"
    else:
        ratio, ext_ms = "   n/a", "      n/a"
    print(f"{name:<36} {t_py * 1e3:9.3f} {ext_ms} {ratio}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"compiled extension available: {_core is not None}")
    print(f"{'kernel':<36} {'numpy ms':>9} {'ext ms':>9} {'speedup':>8}")

    for n in (1_000, 10_000, 100_000):
        values = rng.normal(size=n)
        labels = rng.integers(0, 4, size=n).astype(np.int64)
        bench_case(
            f"best_gini_split  n={n:>7}",
            lambda v=values, l=labels: (v, l, 4),
            lambda impl, v, l, k: impl.best_gini_split(v, l, k),
            args.repeats)

    for n in (1_000, 10_000, 100_000):
        values = rng.normal(size=n)
        grad = rng.normal(size=n)
        hess = rng.uniform(0.01, 1.0, size=n)
        bench_case(
            f"best_grad_split  n={n:>7}",
            lambda v=values, g=grad, h=hess: (v, g, h, 1.0),
            lambda impl, v, g, h, lam: impl.best_grad_split(v, g, h, lam),
            args.repeats)

    for n, m, d in ((200, 200, 40), (1000, 500, 40), (2000, 2000, 80)):
        a = rng.normal(size=(n, d))
        b = rng.normal(size=(m, d))
        bench_case(
            f"pairwise_sq_dists {n}x{m}x{d}",
            lambda a=a, b=b: (a, b),
            lambda impl, a, b: impl.pairwise_sq_dists(a, b),
            args.repeats)


if __name__ == "__main__":
    main()
