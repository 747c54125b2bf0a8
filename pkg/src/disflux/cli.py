"""Batch command-line front end.

Subcommands: solve, check-entropy, check-kinetic, germ, w-sweep, contract,
commutator.  All outputs are CSV files in the --out directory plus a
run_manifest.json recording the config hash, tolerances and versions.
Exit codes: 0 on success / PASS, 2 on a failed verification verdict,
1 on usage or config errors.  DISFLUX_THREADS caps worker threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import contraction as contraction_mod
from . import germ as germ_mod
from . import kinetic as kinetic_mod
from . import solver1d
from .config import ProblemConfig, parse_config
from .errors import ConfigError, DisfluxError
from .fluxmodel import build_flux_model
from .kernels import BUILTIN_KERNELS, StateBox


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "PASS" if x else "FAIL"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _n_workers() -> int:
    cap = os.environ.get("DISFLUX_THREADS")
    if cap:
        return max(1, int(cap))
    return max(1, os.cpu_count() or 1)


def _pool_map(fn, items):
    items = list(items)
    if len(items) <= 1 or _n_workers() == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(_n_workers(), len(items))) as pool:
        return list(pool.map(fn, items))


def _write_manifest(out: Path, subcommand: str, cfg: ProblemConfig | None, extra=None):
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "subcommand": subcommand,
        "disflux_version": __version__,
        "numpy_version": np.__version__,
        "python_version": sys.version.split()[0],
    }
    if cfg is not None:
        manifest.update({
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "tolerances": {"tol_rh": cfg.tol_rh, "c_slack": cfg.c_slack,
                           "tol_neg": cfg.tol_neg, "cfl": cfg.cfl},
        })
    if extra:
        manifest.update(extra)
    with open(out / "run_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def _load_config(args) -> ProblemConfig:
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    return parse_config(args.config)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_solve(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    traj = solver1d.run(cfg)
    rows = []
    for snap in traj.snapshots:
        for x, u in zip(traj.grid.centers, snap.values):
            rows.append((snap.time, x, u))
    _write_csv(out / "snapshots.csv", ("t", "x_center", "u"), rows)
    trows = []
    for n, t in enumerate(traj.times):
        for i in range(traj.interface_traces.shape[1]):
            um, up, uh, phi = traj.interface_traces[n, i]
            trows.append((t, i, um, up, uh, phi))
    _write_csv(out / "traces.csv",
               ("t", "interface_index", "u_minus", "u_plus", "u_hat", "flux"), trows)
    _write_manifest(out, "solve", cfg)
    return 0


def _cmd_check_entropy(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    traj = solver1d.run(cfg)
    report = kinetic_mod.kruzkov_residual(traj)
    rows = []
    edges_x = traj.grid.edges[1:-1]
    for m in range(report.values.shape[0]):
        t = traj.times[m + 1]
        for e in range(report.values.shape[1]):
            rows.append((t, edges_x[e], report.argmax_c[m, e], report.values[m, e]))
    rows.append(("summary", "max_positive", report.slack, report.max_positive))
    _write_csv(out / "residual.csv", ("t", "x", "v", "value"), rows)
    _write_manifest(out, "check-entropy", cfg,
                    {"max_positive": report.max_positive, "slack": report.slack,
                     "verdict": "PASS" if report.passed else "FAIL"})
    return 0 if report.passed else 2


def _cmd_check_kinetic(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    traj = solver1d.run(cfg)
    model = traj.model
    vgrid = kinetic_mod.VGrid(cfg.u_min - 1.0, cfg.u_max + 1.0, cfg.n_v)
    tol_neg = cfg.tol_neg if cfg.tol_neg > 0 else None
    dm = kinetic_mod.kinetic_defect(traj, model, vgrid, tol_neg=tol_neg)
    rows = []
    v = vgrid.centers
    xc = traj.grid.centers
    for n in range(dm.values.shape[0]):
        t = 0.5 * (traj.times[n] + traj.times[n + 1])
        keep = np.argwhere(np.abs(dm.values[n]) > args.threshold)
        for j, m in keep:
            rows.append((t, xc[j], v[m], dm.values[n, j, m]))
    rows.append(("summary", "total_mass_min_value", dm.total_mass, dm.min_value))
    _write_csv(out / "defect.csv", ("t", "x", "v", "value"), rows)
    _write_manifest(out, "check-kinetic", cfg,
                    {"total_mass": dm.total_mass, "min_value": dm.min_value,
                     "tol_neg": dm.tol_neg, "verdict": "PASS" if dm.passed else "FAIL"})
    return 0 if dm.passed else 2


def _germ_model(args):
    kernel = BUILTIN_KERNELS[args.kernel]()
    if args.box_min is None or args.box_max is None:
        lo, hi = (0.0, 1.0) if args.kernel == "lwr" else (-1.0, 1.0)
    else:
        lo, hi = args.box_min, args.box_max
    return build_flux_model(kernel, (-1.0, 1.0), (0.0,),
                            (args.k_left, args.k_right), StateBox(lo, hi))


def _cmd_germ(args) -> int:
    out = Path(args.out)
    model = _germ_model(args)
    if args.sweep:
        report = germ_mod.w_sign_sweep(model, 0, args.sweep, seed=args.seed)
        _write_csv(out / "w_sweep.csv",
                   ("kernel", "k_left", "k_right", "n_pairs", "n_states",
                    "max_w", "violations", "q_min", "q_max", "q_mean"),
                   [(args.kernel, args.k_left, args.k_right, report.n_pairs,
                     report.n_states, report.max_w, report.violations,
                     report.q_min, report.q_max, report.q_mean)])
        _write_manifest(out, "germ-sweep", None,
                        {"violations": report.violations, "max_w": report.max_w})
        return 0 if report.violations == 0 else 2
    if args.u_minus is None or args.u_plus is None or args.u_hat is None:
        raise ConfigError("germ needs --u-minus, --u-plus and --u-hat (or --sweep N)")
    state = germ_mod.germ_state(model, 0, args.u_minus, args.u_plus, args.u_hat)
    report = germ_mod.is_admissible(state)
    worst = ";".join(f"{cid}:{_fmt(m)}" for cid, m in report.violated_conditions[:3])
    _write_csv(out / "germ.csv",
               ("kernel", "k_left", "k_right", "u_minus", "u_plus", "u_hat",
                "rh_residual", "admissible", "q_value", "violated"),
               [(args.kernel, args.k_left, args.k_right, args.u_minus, args.u_plus,
                 args.u_hat, report.rh_residual, report.admissible,
                 report.q_value, worst)])
    _write_manifest(out, "germ", None, {"admissible": bool(report.admissible)})
    return 0 if report.admissible else 2


def _cmd_w_sweep(args) -> int:
    return _cmd_germ(args)


def _cmd_contract(args) -> int:
    cfg = _load_config(args)
    if cfg.initial_b is None:
        raise ConfigError("contract needs an [initial_b] section in the config")
    out = Path(args.out)
    cfg_b = ProblemConfig(**{**cfg.__dict__, "initial": cfg.initial_b})
    traj_a, traj_b = _pool_map(solver1d.run, [cfg, cfg_b])
    c_slack = cfg.c_slack if cfg.c_slack > 0 else None
    report = contraction_mod.contraction_report(traj_a, traj_b, c_slack=c_slack)
    rows = [(t, d, k) for t, d, k in zip(report.times, report.l1_distances,
                                         report.kinetic_distances)]
    rows.append(("summary", report.max_increase, report.slack_budget))
    _write_csv(out / "contraction.csv", ("t", "l1_distance", "kinetic_distance"), rows)
    _write_manifest(out, "contract", cfg,
                    {"max_increase": report.max_increase,
                     "slack_budget": report.slack_budget,
                     "verdict": "PASS" if report.verdict else "FAIL"})
    return 0 if report.verdict else 2


def _cmd_commutator(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    model = cfg.build_model()
    grid = solver1d.build_grid(model, cfg.n_cells)
    u = solver1d.CellField(grid, cfg.initial_values(grid.centers))
    vgrid = kinetic_mod.VGrid(cfg.u_min - 1.0, cfg.u_max + 1.0, cfg.n_v)
    eps_list = [float(e) for e in args.eps.split(",")]
    masses = kinetic_mod.commutator_decay(u, model, vgrid, eps_list)
    _write_csv(out / "commutator.csv", ("epsilon", "mass"),
               list(zip(eps_list, masses)))
    tail = masses[np.argmax(masses):]
    ok = bool(len(tail) < 2 or np.all(np.diff(tail) < 0))
    _write_manifest(out, "commutator", cfg, {"verdict": "PASS" if ok else "FAIL"})
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disflux",
        description="1D conservation laws with discontinuous flux: solver and checkers")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="TOML problem config")
        p.add_argument("--out", default="out", help="output directory")

    for name, fn in (("solve", _cmd_solve), ("check-entropy", _cmd_check_entropy),
                     ("check-kinetic", _cmd_check_kinetic), ("contract", _cmd_contract)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=fn)
        if name == "check-kinetic":
            p.add_argument("--threshold", type=float, default=1e-12,
                           help="export |value| above this only")

    p = sub.add_parser("commutator")
    common(p)
    p.add_argument("--eps", default="0.2,0.1,0.05", help="comma list of widths")
    p.set_defaults(func=_cmd_commutator)

    for name in ("germ", "w-sweep"):
        p = sub.add_parser(name)
        p.add_argument("--out", default="out")
        p.add_argument("--kernel", choices=sorted(BUILTIN_KERNELS), default="lwr")
        p.add_argument("--k-left", type=float, default=1.0)
        p.add_argument("--k-right", type=float, default=2.0)
        p.add_argument("--u-minus", type=float)
        p.add_argument("--u-plus", type=float)
        p.add_argument("--u-hat", type=float)
        p.add_argument("--box-min", type=float)
        p.add_argument("--box-max", type=float)
        p.add_argument("--seed", type=int, default=0)
        if name == "w-sweep":
            p.add_argument("--samples", dest="sweep", type=int, default=100_000)
            p.set_defaults(func=_cmd_w_sweep)
        else:
            p.add_argument("--sweep", type=int, default=0)
            p.set_defaults(func=_cmd_germ)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DisfluxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
