#!/usr/bin/env python3
"""Benchmark the compiled Monte Carlo kernels against the NumPy fallback.

The two hot reductions are the per-replicate squared-error accumulation used
by the Monte Carlo contraction oracle and the ball-exit counter used by the
nested contraction simulation.  Usage:

    python benchmarks/bench_kernels.py [--reps 20000] [--dim 2000]
"""

import argparse
import time

import numpy as np

from spclab import _purekernels

try:
    from spclab import _speedups
except ImportError:
    _speedups = None


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--dim", type=int, default=2000)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    shift = rng.standard_normal(args.dim)
    scale = np.abs(rng.standard_normal(args.dim))
    noise = rng.standard_normal((args.reps, args.dim))
    dev = rng.standard_normal(args.dim) * 0.1
    sd = np.abs(rng.standard_normal(args.dim)) * 0.1

    rows = []
    t_pure = timeit(_purekernels.spc_replicates, shift, scale, noise)
    rows.append(("spc_replicates", t_pure, None))
    t_pure_c = timeit(_purekernels.count_outside, dev, sd, 0.01, 1.0, noise)
    rows.append(("count_outside", t_pure_c, None))
    if _speedups is not None:
        t_fast = timeit(_speedups.spc_replicates, shift, scale, noise)
        rows[0] = ("spc_replicates", t_pure, t_fast)
        t_fast_c = timeit(_speedups.count_outside, dev, sd, 0.01, 1.0, noise)
        rows[1] = ("count_outside", t_pure_c, t_fast_c)
        a = np.asarray(_speedups.spc_replicates(shift, scale, noise))
        b = _purekernels.spc_replicates(shift, scale, noise)
        agree = float(np.max(np.abs(a - b) / np.abs(b)))
    else:
        agree = float("nan")

    print(f"reps={args.reps} dim={args.dim}")
    print(f"{'kernel':<16}{'numpy (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}")
    for name, tp, tf in rows:
        if tf is None:
            print(f"{name:<16}{tp * 1e3:>12.2f}{'n/a':>15}{'':>9}")
        else:
            print(f"{name:<16}{tp * 1e3:>12.2f}{tf * 1e3:>15.2f}{tp / tf:>9.2f}")
    if _speedups is None:
        print("compiled extension not built; only the fallback was timed")
    else:
        print(f"max relative backend difference (spc_replicates): {agree:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
