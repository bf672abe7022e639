#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy/scipy fallback.

The hot loops are the batched theta-scheme march (per-mode tridiagonal
solves every step) and the batched resolvent solves behind the Dunford
quadrature. Run:

    python benchmarks/bench_kernels.py [--steps 2000] [--points 1025] [--modes 4]

The script re-executes itself once with CONELAB_NUMBA=0 to time the
fallback, then prints a side-by-side table.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def build_problem(points: int, modes: int):
    rng = np.random.default_rng(0)
    tau = np.linspace(-8.0, 0.0, points)
    h = -tau[0] / (points - 1)
    w = np.exp(-2.0 * tau)
    dl = np.tile(w / h**2, (modes, 1)).astype(complex)
    du = dl.copy()
    d = np.tile(-2.0 * w / h**2, (modes, 1)).astype(complex)
    dl[:, 0] = 0.0
    du[:, -1] = 0.0
    dt = 1e-4
    A = (-0.5 * dt * dl, 1.0 - 0.5 * dt * d, -0.5 * dt * du)
    B = (0.5 * dt * dl, 1.0 + 0.5 * dt * d, 0.5 * dt * du)
    u0 = (rng.standard_normal((modes, points))
          + 1j * rng.standard_normal((modes, points)))
    return A, B, u0


def run_case(steps: int, points: int, modes: int, batch: int) -> dict:
    from conelab import _kernels

    A, B, u0 = build_problem(points, modes)
    # warm-up covers jit compilation so the timing is steady-state
    _kernels.evolve_theta(*A, *B, u0, 4, 4)
    t0 = time.perf_counter()
    _kernels.evolve_theta(*A, *B, u0, steps, steps)
    t_evolve = time.perf_counter() - t0

    rng = np.random.default_rng(1)
    dl, d, du = A
    DL = np.tile(dl[0], (batch, 1))
    DU = np.tile(du[0], (batch, 1))
    D = np.tile(d[0], (batch, 1)) + rng.standard_normal((batch, 1))
    R = rng.standard_normal((batch, points)) + 0j
    _kernels.thomas_batch(DL[:4], D[:4], DU[:4], R[:4])
    t0 = time.perf_counter()
    _kernels.thomas_batch(DL, D, DU, R)
    t_solve = time.perf_counter() - t0
    return {"backend": _kernels.backend_name(),
            "evolve_s": t_evolve, "batch_solve_s": t_solve}


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--points", type=int, default=1025)
    ap.add_argument("--modes", type=int, default=4)
    ap.add_argument("--batch", type=int, default=4096)
    ap.add_argument("--json-only", action="store_true")
    args = ap.parse_args()

    mine = run_case(args.steps, args.points, args.modes, args.batch)
    if args.json_only:
        print(json.dumps(mine))
        return 0

    env = dict(os.environ)
    env["CONELAB_NUMBA"] = "0" if mine["backend"] == "numba" else "1"
    proc = subprocess.run(
        [sys.executable, __file__, "--steps", str(args.steps), "--points",
         str(args.points), "--modes", str(args.modes), "--batch",
         str(args.batch), "--json-only"],
        env=env, capture_output=True, text=True)
    rows = [mine]
    if proc.returncode == 0:
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    else:
        print("fallback run failed:", proc.stderr, file=sys.stderr)

    print(f"\ntheta-march: {args.steps} steps x {args.modes} modes x "
          f"{args.points} points; batched solve: {args.batch} x {args.points}")
    print(f"{'backend':<10} {'evolve [s]':>12} {'batch solve [s]':>16}")
    for r in rows:
        print(f"{r['backend']:<10} {r['evolve_s']:>12.4f} {r['batch_solve_s']:>16.4f}")
    if len(rows) == 2 and rows[1]["evolve_s"] > 0:
        print(f"\nspeedup (evolve): {rows[1]['evolve_s'] / rows[0]['evolve_s']:.1f}x, "
              f"(batch solve): {rows[1]['batch_solve_s'] / rows[0]['batch_solve_s']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
