#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from kcut import _kernels_py
from kcut import kernels
from kcut.distributions import table1_pmf

try:
    from kcut import _kernels

    BACKENDS = [("compiled", _kernels), ("numpy", _kernels_py)]
except ImportError:
    BACKENDS = [("numpy", _kernels_py)]


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    emp = table1_pmf()
    cdf = emp.cdf()
    n = emp.n
    rng = np.random.default_rng(0)
    p = rng.random(n)
    p /= p.sum()

    cases = []
    for name, impl in BACKENDS:
        t_conv = timeit(lambda: [impl.convolve_cyclic(p, p) for _ in range(100)])
        cases.append((f"convolve_cyclic n={n} x100", name, t_conv))

        states = impl.streams_init(42, 0, 1_000_000)
        t_kcut = timeit(lambda: impl.kcut_positions(states.copy(), cdf, n, 6), repeat=3)
        cases.append(("kcut_positions 1e6 draws k=6", name, t_kcut))

        states_s = impl.streams_init(42, 0, 2048)
        t_ps = timeit(
            lambda: impl.position_switch_matrix(states_s.copy(), 1000, 1000), repeat=3
        )
        cases.append(("position_switch 2048x1000", name, t_ps))

    width = max(len(c[0]) for c in cases)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<{width}}  {'backend':<9}  best time")
    for label, name, t in cases:
        print(f"{label:<{width}}  {name:<9}  {t*1000:9.2f} ms")

    if len(BACKENDS) == 2:
        print("\nspeedups (compiled vs numpy):")
        by_label = {}
        for label, name, t in cases:
            by_label.setdefault(label, {})[name] = t
        for label, d in by_label.items():
            print(f"  {label:<{width}}  {d['numpy'] / d['compiled']:.1f}x")


if __name__ == "__main__":
    main()
