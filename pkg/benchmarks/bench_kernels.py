#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy fallback.

Run from a checkout with the package importable:

    python benchmarks/bench_kernels.py

Backend selection is swapped in-process, so one run times both paths on
identical inputs.  Without the built extension only the fallback is timed.
"""

import time


import expwalk as ew
from expwalk import kernels, walks


def best_of(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def with_backend(core, fn):
    saved = kernels._core
    kernels._core = core
    try:
        return best_of(fn)
    finally:
        kernels._core = saved


def dp_case(name, chain, t):
    return name, lambda: walks.exact_weight_law(chain, t)


def jacobi_case(name, g):
    return name, lambda: ew.spectrum(g)


def main():
    g16 = ew.build_random_regular(16, 3, seed=1)
    lab16 = ew.random_balanced_labelling(g16, seed=3)
    g32 = ew.build_random_regular(32, 3, seed=5)
    lab32 = ew.random_balanced_labelling(g32, seed=1)
    g96 = ew.build_random_regular(96, 5, seed=2)

    cases = [
        dp_case("law: sticky p=1/3, t=4096", ew.sticky_chain(1 / 3), 4096),
        dp_case("law: n=16 d=3 walk, t=4096", ew.walk_chain(g16, lab16), 4096),
        dp_case("law: n=32 d=3 walk, t=512", ew.walk_chain(g32, lab32), 512),
        jacobi_case("spectrum: n=32 d=3", g32),
        jacobi_case("spectrum: n=96 d=5", g96),
    ]

    have_ext = kernels._core is not None
    header = f"{'case':36s} {'python':>10s}"
    if have_ext:
        header += f" {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, fn in cases:
        py = with_backend(None, fn)
        line = f"{name:36s} {py * 1e3:9.1f}ms"
        if have_ext:
            cy = with_backend(kernels._core, fn)
            line += f" {cy * 1e3:9.1f}ms {py / cy:7.2f}x"
        print(line)
    if not have_ext:
        print("\ncompiled extension not available; showing the fallback only")


if __name__ == "__main__":
    main()
