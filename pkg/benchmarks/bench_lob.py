#!/usr/bin/env python3
"""Benchmark the Lobachevsky kernels: compiled extension vs numpy fallback.

Times array evaluation at several batch sizes plus the end-to-end volume
identity workload that dominates the acceptance suite.

    python benchmarks/bench_lob.py [--repeats N]
"""

import argparse
import time

import numpy as np

from hyperideal import _lob_np
from hyperideal import energy
from hyperideal.lob import backend

try:
    from hyperideal import _lob_cy
except ImportError:
    _lob_cy = None


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {backend()}")
    kernels = [("numpy", _lob_np.lob_array)]
    if _lob_cy is not None:
        kernels.append(("cython", _lob_cy.lob_array))
    else:
        print("compiled kernel not available; benchmarking the fallback only")

    print(f"\n{'n':>10} " + " ".join(f"{name:>12}" for name, _ in kernels) + "   speedup")
    for n in (1_000, 10_000, 100_000, 1_000_000):
        xs = rng.uniform(-10.0, 10.0, n)
        times = [timeit(fn, xs, repeats=args.repeats) for _, fn in kernels]
        rate = " ".join(f"{n / t / 1e6:9.1f}M/s" for t in times)
        speedup = f"{times[0] / times[-1]:8.2f}x" if len(times) > 1 else ""
        print(f"{n:>10} {rate}   {speedup}")

    # the dominating acceptance workload: volume + five-tetra identity
    a, g = energy.sample_delta(100_000, rng)

    def identity_workload(lob_array):
        args15 = energy.lob_arguments(a, g)
        v2 = lob_array(args15).sum(axis=-1)
        idx = np.array(energy.FIVE_TRIPLES)
        five = lob_array(args15[..., idx]).sum(axis=(-1, -2))
        return np.max(np.abs(v2 - five))

    print("\nfive-tetrahedra identity on 1e5 samples:")
    for name, fn in kernels:
        t = timeit(identity_workload, fn, repeats=args.repeats)
        print(f"  {name:>7}: {t * 1e3:8.1f} ms")


if __name__ == "__main__":
    main()
