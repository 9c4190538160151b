#!/usr/bin/env python3
"""Compare the compiled and pure-NumPy evaluation kernels.

Checks that both backends produce the same values, then times elementwise
evaluation and gradient computation at several batch sizes.

Run from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from uafkit import _kernels_np

try:
    from uafkit import _kernels_cy
except ImportError:
    _kernels_cy = None

PARAMS = (1.01605291, 0.49210036, 0.0, 1.01605291, 0.0)
SIZES = (1_000, 10_000, 100_000, 1_000_000)
REPEATS = 7


def _time(fn, xs):
    best = float("inf")
    for _ in range(REPEATS):
        start = time.perf_counter()
        fn(xs, *PARAMS)
        best = min(best, time.perf_counter() - start)
    return best


def check_agreement() -> None:
    rng = np.random.default_rng(0)
    xs = rng.uniform(-50.0, 50.0, size=10_000)
    f_np = _kernels_np.uaf_eval(xs, *PARAMS)
    f_cy = np.asarray(_kernels_cy.uaf_eval(xs, *PARAMS))
    np.testing.assert_allclose(f_cy, f_np, rtol=1e-12, atol=1e-12)
    g_np = _kernels_np.uaf_grad(xs, *PARAMS)
    g_cy = np.asarray(_kernels_cy.uaf_grad(xs, *PARAMS))
    np.testing.assert_allclose(g_cy, g_np, rtol=1e-12, atol=1e-12)
    print("agreement: eval and grad match within 1e-12 on 10,000 points\n")


def main() -> None:
    if _kernels_cy is None:
        print("compiled backend not built; nothing to compare "
              "(pip install -e . --no-build-isolation)")
        return
    check_agreement()
    header = f"{'op':6} {'n':>10} {'numpy (ms)':>12} {'cython (ms)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(1)
    for op, fn_np, fn_cy in (
        ("eval", _kernels_np.uaf_eval, _kernels_cy.uaf_eval),
        ("grad", _kernels_np.uaf_grad, _kernels_cy.uaf_grad),
    ):
        for n in SIZES:
            xs = rng.uniform(-50.0, 50.0, size=n)
            t_np = _time(fn_np, xs)
            t_cy = _time(fn_cy, xs)
            print(f"{op:6} {n:>10,} {t_np * 1e3:>12.3f} {t_cy * 1e3:>12.3f} "
                  f"{t_np / t_cy:>8.2f}x")


if __name__ == "__main__":
    main()
