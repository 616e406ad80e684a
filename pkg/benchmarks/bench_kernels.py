"""Time the hot kernels with numba on and off.

Each setting runs in its own interpreter because SOLITON_LAB_NO_JIT is read at
import.  Compilation is triggered once before timing starts.

    python3 benchmarks/bench_kernels.py [--points 2000] [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _timed(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def worker(points, repeat):
    from soliton_lab import _jit, catalog, kernels, ode

    rng = np.random.default_rng(0)
    n = points
    g = np.zeros((n, 4, 4))
    d = rng.uniform(0.5, 2.0, (n, 4))
    for k in range(4):
        g[:, k, k] = d[:, k]
    dg = rng.normal(size=(n, 4, 4, 4))
    dg = 0.5 * (dg + dg.transpose(0, 1, 3, 2))
    ddg = rng.normal(size=(n, 4, 4, 4, 4))
    ddg = 0.5 * (ddg + ddg.transpose(0, 2, 1, 3, 4))
    ddg = 0.5 * (ddg + ddg.transpose(0, 1, 2, 4, 3))

    z = rng.uniform(-2, 2, 50 * n)
    f = rng.uniform(0.5, 2, z.size)
    f1 = rng.normal(size=z.size)
    f2 = rng.normal(size=z.size)

    spec = catalog.FamilySpec("S1")
    grid = catalog.default_grid(spec)

    def verify():
        catalog.verify_family(spec, grid, geometry_checks=False)

    def star():
        ode.integrate_star(1, 1, 1, (1, 0, -1), mode="offset")

    out = {
        "jit": _jit.JIT_ENABLED,
        "riemann": _timed(lambda: kernels.riemann(g, dg, ddg), repeat),
        "star_f3_batch": _timed(lambda: kernels.star_f3_batch(1, 1, -2, z, f, f1, f2), repeat),
        "integrate_star": _timed(star, repeat),
        "verify_S1": _timed(verify, max(1, repeat // 2)),
    }
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.points, args.repeat)
        return
    rows = {}
    for label, flag in (("jit", "0"), ("numpy", "1")):
        env = dict(os.environ, SOLITON_LAB_NO_JIT=flag)
        res = subprocess.run([sys.executable, __file__, "--worker", "--points", str(args.points),
                              "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        rows[label] = json.loads(res.stdout.strip().splitlines()[-1])
    if not rows["jit"]["jit"]:
        print("numba unavailable: both runs used the numpy path")
    print(f"{'kernel':<16} {'jit [s]':>12} {'numpy [s]':>12} {'speedup':>9}")
    for k in ("riemann", "star_f3_batch", "integrate_star", "verify_S1"):
        a, b = rows["jit"][k], rows["numpy"][k]
        print(f"{k:<16} {a:12.5f} {b:12.5f} {b / a:9.2f}")


if __name__ == "__main__":
    main()
