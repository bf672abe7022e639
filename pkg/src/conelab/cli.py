"""Command-line entry point wiring configs to the computational modules.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 numerical
failure. Every run directory receives a manifest.json sufficient to re-run
the job; CSV payloads are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import backend_name
from .asymptotics import AsymptoticsBasis, AsymptoticsTerm, domain_membership, enumerate_asymptotics
from .config import (cross_section_from_config, fmt, gamma_from_config,
                     grid_from_config, load_config, operator_from_config,
                     resolve_outdir)
from .errors import ConelabError, ConfigError
from .mellin_sobolev import LogGrid, RadialField, mellin_norm
from .rational import root_to_complex
from .symbol_algebra import pole_set, pole_set_power
from .heat_solver import HeatConfig, assemble_mode_operator, solve_heat
from .power_calculus import dunford_power, find_sectorial_shift
from .tip_analysis import fit_tip_expansion


def _write_manifest(outdir: Path, args_echo: dict, cfg: dict, t0: float, outputs: list):
    manifest = {
        "tool": "conelab",
        "version": __version__,
        "backend": backend_name(),
        "command": args_echo,
        "config": cfg,
        "seed": cfg.get("seed", 0),
        "wall_time_s": time.time() - t0,
        "outputs": outputs,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)


def cmd_poles(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config)
    cs = cross_section_from_config(cfg["cross_section"])
    spec = operator_from_config(cfg, cs)
    gamma = gamma_from_config(cfg, cs)
    ps = pole_set_power(spec, gamma, args.power) if args.power > 1 \
        else pole_set(spec, gamma)
    outdir = resolve_outdir(Path(args.out).parent if args.out else cfg.get("output_dir"))
    path = Path(args.out) if args.out else outdir / "poles.csv"
    rows = []
    for label, rho, order, inside in ps.candidates:
        z = root_to_complex(rho)
        rows.append((label, z.real, z.imag, order - 1, inside))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode", "label", "re_rho", "im_rho", "max_log_power", "in_strip"])
        for label, re, im, mlp, inside in rows:
            w.writerow([label, label, fmt(re), fmt(im), mlp, str(bool(inside)).lower()])
    _write_manifest(path.parent, {"subcommand": "poles", "power": args.power}, cfg,
                    t0, [str(path)])
    print(f"wrote {path} ({len(rows)} candidate poles, strip "
          f"[{float(ps.strip[0])}, {float(ps.strip[1])}))")
    return 0


def cmd_asymptotics(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config)
    cs = cross_section_from_config(cfg["cross_section"])
    spec = operator_from_config(cfg, cs)
    gamma = gamma_from_config(cfg, cs)
    ps = pole_set(spec, gamma)
    basis = enumerate_asymptotics(ps)
    realizations = args.realizations.split(",") if args.realizations else ["DD", "max"]
    table = []
    for rho, m, mode in basis.terms:
        term = AsymptoticsTerm(rho, m, mode)
        entry = {"re_rho": root_to_complex(rho).real, "im_rho": root_to_complex(rho).imag,
                 "m": m, "mode": mode, "membership": {}}
        for r in realizations:
            res = domain_membership(term, r if not r.startswith("power") else
                                    ("power", int(r.split(":")[1])), gamma, spec)
            entry["membership"][r] = {"member": res.member, "reason": res.reason}
        table.append(entry)
    payload = {"gamma": float(gamma), "strip": [float(ps.strip[0]), float(ps.strip[1])],
               "basis": table,
               "exact": ps.exact, "convention_pending": ps.convention_pending}
    outdir = resolve_outdir(Path(args.out).parent if args.out else cfg.get("output_dir"))
    path = Path(args.out) if args.out else outdir / "asymptotics.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    _write_manifest(path.parent, {"subcommand": "asymptotics"}, cfg, t0, [str(path)])
    print(f"wrote {path} ({len(table)} basis terms)")
    return 0


def _read_field_csv(path: Path, grid: LogGrid, cs, max_modes: int) -> RadialField:
    field = RadialField.zeros(grid, cs, max_modes)
    by_mode: dict = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            by_mode.setdefault(row["mode"], []).append(
                (float(row["tau"]), float(row["re"]), float(row["im"])))
    for mode, entries in by_mode.items():
        entries.sort()
        taus = np.array([e[0] for e in entries])
        if len(taus) != grid.points or not np.allclose(taus, grid.tau, atol=1e-10):
            raise ConfigError(f"field file {path} does not match the config grid")
        field.values[field.mode_index(mode)] = (
            np.array([e[1] for e in entries]) + 1j * np.array([e[2] for e in entries]))
    return field


def _write_field_csv(path: Path, field: RadialField):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "mode", "re", "im"])
        for i, mode in enumerate(field.modes):
            for tau, v in zip(field.grid.tau, field.values[i]):
                w.writerow([fmt(tau), mode.label, fmt(v.real), fmt(v.imag)])


def cmd_norm(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config)
    cs = cross_section_from_config(cfg["cross_section"])
    grid = grid_from_config(cfg)
    gamma = gamma_from_config(cfg, cs)
    max_modes = int(cfg.get("operator", {}).get("max_modes", 3))
    field = _read_field_csv(Path(args.field), grid, cs, max_modes)
    value = mellin_norm(field, s=args.s, gamma=float(gamma), p=args.p)
    print(f"H^({args.s},{float(gamma)})_{args.p} norm = {fmt(value)}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"s": args.s, "gamma": float(gamma), "p": args.p,
                       "norm": value}, fh, indent=2)
        _write_manifest(Path(args.out).parent, {"subcommand": "norm"}, cfg, t0,
                        [args.out])
    return 0


def cmd_solve_heat(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config)
    cs = cross_section_from_config(cfg["cross_section"])
    grid = grid_from_config(cfg)
    gamma = gamma_from_config(cfg, cs, require_window=True)
    heat = cfg.get("heat", {})
    max_modes = int(cfg.get("operator", {}).get("max_modes", 3))
    hc = HeatConfig(cross_section=cs, grid=grid, T=float(heat.get("T", 0.1)),
                    dt=float(heat.get("dt", 1e-4)),
                    outer_bc=heat.get("outer_bc", "dirichlet"),
                    theta=float(heat.get("theta", 0.5)), max_modes=max_modes,
                    snapshot_every=int(heat.get("snapshot_every", 0)))
    u0 = _read_field_csv(Path(args.u0), grid, cs, max_modes)
    traj = solve_heat(u0, None, hc)
    outdir = resolve_outdir(args.out)
    outputs = []
    for idx, (t, f) in enumerate(zip(traj.times, traj.fields)):
        path = outdir / f"snapshot_{idx:05d}.csv"
        _write_field_csv(path, f)
        outputs.append(str(path))
    meta = {"times": traj.times, "scheme": {"theta": hc.theta, "dt": hc.dt},
            "outer_bc": hc.outer_bc, "gamma": float(gamma)}
    with open(outdir / "trajectory.json", "w") as fh:
        json.dump(meta, fh, indent=2)
    _write_manifest(outdir, {"subcommand": "solve-heat", "u0": str(args.u0)}, cfg,
                    t0, outputs)
    print(f"wrote {len(outputs)} snapshots to {outdir}")
    return 0


def cmd_fit_tip(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config) if args.config else {}
    trajdir = Path(args.traj)
    meta_path = trajdir / "trajectory.json"
    if not meta_path.exists():
        raise ConfigError(f"no trajectory.json in {trajdir}")
    with open(meta_path) as fh:
        meta = json.load(fh)
    with open(args.basis) as fh:
        basis_payload = json.load(fh)
    triples = tuple((complex(b["re_rho"], b["im_rho"]), int(b["m"]), b["mode"])
                    for b in basis_payload["basis"])
    basis = AsymptoticsBasis(terms=triples, provenance=None)
    manifest = json.loads((trajdir / "manifest.json").read_text())
    run_cfg = manifest["config"]
    cs = cross_section_from_config(run_cfg["cross_section"])
    grid = grid_from_config(run_cfg)
    max_modes = int(run_cfg.get("operator", {}).get("max_modes", 3))
    window = tuple(cfg.get("fit", {}).get("window")) if cfg.get("fit", {}).get("window") \
        else None
    rows = []
    snaps = sorted(trajdir.glob("snapshot_*.csv"))
    for t, snap in zip(meta["times"], snaps):
        fld = _read_field_csv(snap, grid, cs, max_modes)
        fit = fit_tip_expansion(fld, basis, window=window, t=t)
        for fc in fit.coefficients:
            rows.append((t, fc.rho.real, fc.rho.imag, fc.m, fc.mode, fc.c.real,
                         fc.c.imag, fit.residual_norm,
                         fit.mode_residual_exponents.get(fc.mode, math.nan)))
    path = Path(args.out)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "rho_re", "rho_im", "m", "mode", "c_re", "c_im",
                    "residual", "decay_exp"])
        for row in rows:
            w.writerow([fmt(row[0]), fmt(row[1]), fmt(row[2]), row[3], row[4],
                        fmt(row[5]), fmt(row[6]), fmt(row[7]), fmt(row[8])])
    _write_manifest(path.parent, {"subcommand": "fit-tip", "traj": str(trajdir)},
                    run_cfg, t0, [str(path)])
    print(f"wrote {path} ({len(rows)} fitted coefficients)")
    return 0


def cmd_powers(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config)
    blk = cfg.get("powers", {})
    z = complex(float(blk.get("z_re", -0.5)), float(blk.get("z_im", 0.0)))
    cs = cross_section_from_config(cfg["cross_section"])
    grid = grid_from_config(cfg)
    mode = cs.mode_table(int(cfg.get("operator", {}).get("max_modes", 1)))[0]
    L = assemble_mode_operator(cs.n, mode.eigenvalue, grid,
                               cfg.get("heat", {}).get("outer_bc", "neumann"))
    theta = float(blk.get("theta", 0.75 * math.pi))
    shift, sect = find_sectorial_shift(L, theta, c0=float(blk.get("shift0", 1.0)))
    M = (-L).shifted(shift)
    power = dunford_power(M, z) if M.dim <= int(blk.get("dense_limit", 700)) else None
    report = {
        "z": [z.real, z.imag], "shift": shift, "theta": theta,
        "sectorial_K": sect.K,
        "min_abs_eig": sect.min_abs_eig,
        "quadrature": {"n_quad": 64, "tail_tol": 1e-10},
        "power_norm": float(np.linalg.norm(power.data, 2)) if power is not None else None,
        "tail_bound": power.provenance.get("tail_bound") if power is not None else None,
    }
    outdir = resolve_outdir(cfg.get("output_dir"))
    path = Path(args.out) if args.out else outdir / "powers.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
    _write_manifest(path.parent, {"subcommand": "powers"}, cfg, t0, [str(path)])
    print(f"wrote {path}")
    return 0


def cmd_sectorial_probe(args) -> int:
    t0 = time.time()
    cfg = load_config(args.config)
    blk = cfg.get("powers", {})
    cs = cross_section_from_config(cfg["cross_section"])
    grid = grid_from_config(cfg)
    mode = cs.mode_table(int(cfg.get("operator", {}).get("max_modes", 1)))[0]
    L = assemble_mode_operator(cs.n, mode.eigenvalue, grid,
                               cfg.get("heat", {}).get("outer_bc", "neumann"))
    theta = float(blk.get("theta", 0.75 * math.pi))
    shift, report = find_sectorial_shift(L, theta, c0=float(blk.get("shift0", 1.0)),
                                         n_samples=int(blk.get("samples", 200)))
    payload = {
        "theta": theta, "shift": shift, "K": report.K,
        "spectrum_checked": report.spectrum_checked,
        "min_abs_eig": report.min_abs_eig,
        "samples": [{"re": l.real if isinstance(l, complex) else float(l),
                     "im": l.imag if isinstance(l, complex) else 0.0,
                     "value": v} for l, v in report.samples],
    }
    outdir = resolve_outdir(cfg.get("output_dir"))
    path = Path(args.out) if args.out else outdir / "sectorial.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    _write_manifest(path.parent, {"subcommand": "sectorial-probe"}, cfg, t0, [str(path)])
    print(f"wrote {path} (K = {report.K:.6g} at shift c = {shift})")
    return 0


def cmd_verify(args) -> int:
    from . import verify
    results = verify.run_suite(args.suite)
    verify.print_table(results)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conelab",
                                 description="cone-operator singular analysis laboratory")
    ap.add_argument("--threads", type=int, default=0,
                    help="worker threads for the compiled kernels (0: library default)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("poles", help="conormal-symbol pole set as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_poles)

    p = sub.add_parser("asymptotics", help="asymptotics basis and membership table")
    p.add_argument("--config", required=True)
    p.add_argument("--realizations", default="")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_asymptotics)

    p = sub.add_parser("norm", help="Mellin-Sobolev norm of a field CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("solve-heat", help="evolve the heat equation on the model cone")
    p.add_argument("--config", required=True)
    p.add_argument("--u0", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_solve_heat)

    p = sub.add_parser("fit-tip", help="fit tip expansions along a trajectory")
    p.add_argument("--traj", required=True)
    p.add_argument("--basis", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_fit_tip)

    p = sub.add_parser("powers", help="Dunford complex power of the shifted realization")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_powers)

    p = sub.add_parser("sectorial-probe", help="resolvent sector bound probe")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sectorial_probe)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="all")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        try:
            import numba
            numba.set_num_threads(args.threads)
        except Exception:
            pass
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConelabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
