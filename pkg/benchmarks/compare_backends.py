#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-numpy fallback.

Times the three hot paths (closed-form mean, one scoring step, full MLE
solve) over a replication block and reports throughput for whichever backends
are importable, plus the largest cross-backend deviation.

    python benchmarks/compare_backends.py [--reps 2000] [--n 1000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from cauchy_est import HalfPlanePoint
from cauchy_est.kernels import KIND_RECIPROCAL, load_backend
from cauchy_est.sampling import _cauchy_rows


def _block(reps, n):
    return np.ascontiguousarray(
        _cauchy_rows(n, HalfPlanePoint(0.0, 1.0), 4242, 0, reps)
    )


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = {"python": load_backend("python")}
    try:
        backends["compiled"] = load_backend("compiled")
    except ImportError:
        print("compiled backend not built; timing the fallback only\n")

    x = _block(args.reps, args.n)
    zeros = np.zeros(args.reps)
    cells = args.reps * args.n

    stages = {}
    for name, impl in backends.items():
        y, status = impl.qam_rows(x, KIND_RECIPROCAL, 1j, zeros)
        assert int(status.sum()) == 0

        t_qam, _ = _time(lambda: impl.qam_rows(x, KIND_RECIPROCAL, 1j, zeros), args.repeat)
        t_step, (z, _) = _time(lambda: impl.one_step_rows(x, y), args.repeat)
        t_mle, (theta, _, _, conv) = _time(
            lambda: impl.mle_rows(x, z, 1e-12, 1e-14, 200), args.repeat
        )
        assert conv.all()
        stages[name] = {
            "closed-form mean": (t_qam, None),
            "one scoring step": (t_step, z),
            "full MLE solve": (t_mle, theta),
        }

    header = f"{'stage':<18} " + "".join(f"{b:>16}" for b in stages) + (
        f"{'speedup':>10}" if len(stages) == 2 else ""
    )
    print(f"block: {args.reps} replications x n={args.n} ({cells:,} samples)\n")
    print(header)
    print("-" * len(header))
    for stage in ("closed-form mean", "one scoring step", "full MLE solve"):
        times = [stages[b][stage][0] for b in stages]
        row = f"{stage:<18} " + "".join(
            f"{cells / t / 1e6:>12.1f} M/s" for t in times
        )
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    if len(stages) == 2:
        py, cy = (stages[b] for b in ("python", "compiled"))
        worst = 0.0
        for stage in ("one scoring step", "full MLE solve"):
            a, b = py[stage][1], cy[stage][1]
            worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a)))))
        print(f"\nmax relative deviation between backends: {worst:.2e}")


if __name__ == "__main__":
    main()
