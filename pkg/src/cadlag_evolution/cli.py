"""Command-line front end.

    cadlag-evolution <command> --config <path> --out <dir> [--threads N]

Commands: solve, steady, verify, asymptotics, oracle-compare, mollifier.
Exit codes: 0 success, 2 configuration error, 3 precondition error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics as asy
from .config import ExperimentConfig, load_config
from .errors import ConfigError, EvolutionError, PreconditionError
from .evolution import PairedTrajectory, check_mode, increment_identity, snapshot, weak_residual
from .oracle import StepperConfig, closed_form_modal, quadrature_duhamel, step_modal
from .symbols import check_hermitian
from .trajectory import MollifierParams, Trajectory
from .transform import synthesize_field

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_VERIFY = 0, 2, 3, 4
COMMANDS = ("solve", "steady", "verify", "asymptotics", "oracle-compare", "mollifier")
JUMP_TOL = 1e-12
HERMITIAN_FIELD_TOL = 1e-12


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _json_ready(obj):
    """Floats to 17-significant-digit-stable JSON values, NaN/inf as strings."""
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [_json_ready(obj.real), _json_ready(obj.imag)]
    return obj


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(_json_ready(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _pmap(func, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _output_times(cfg: ExperimentConfig, mode: str) -> list:
    """Grid times plus jump times inside the grid range, tagged with the rows they need."""
    grid = cfg.times()
    lo, hi = float(grid[0]), float(grid[-1])
    jumps = set(float(t) for t in cfg.problem.jump_times() if lo <= t <= hi)
    if mode == "cauchy" and lo <= 0.0 <= hi and cfg.problem.initial.total_variation() > 0:
        jumps.add(0.0)
    if mode != "steady":
        jumps = {t for t in jumps if t >= 0}
    times = sorted(set(float(t) for t in grid) | jumps)
    return [(t, t in jumps) for t in times]


def _trajectory_rows(cfg: ExperimentConfig, mode: str) -> list:
    rows = []
    trajs = [(fid, PairedTrajectory(cfg.problem, mode, f)) for fid, f in cfg.functionals]
    for t, is_jump in _output_times(cfg, mode):
        if mode != "steady" and t < 0:
            continue
        for side in (("left", False), ("right", True)) if is_jump else (("interior", True),):
            for fid, pt in trajs:
                v = pt(t, include_t=side[1])
                rows.append([_fmt(t), fid, _fmt(v.real), _fmt(v.imag), side[0]])
    return rows


def _write_fields(cfg: ExperimentConfig, mode: str, out: str, prefix: str) -> list:
    names = []
    if cfg.spatial_grid is None:
        return names
    for k, t in enumerate(cfg.field_times):
        field = synthesize_field(snapshot(cfg.problem, mode, t), cfg.spatial_grid, time_tag=t)
        name = f"{prefix}_field_{k:03d}.csv"
        field.write_csv(os.path.join(out, name))
        names.append(name)
    return names


def cmd_solve(cfg: ExperimentConfig, out: str, threads: int, mode: str | None = None) -> int:
    mode = mode or cfg.mode
    check_mode(cfg.problem, mode)
    prefix = "steady" if mode == "steady" else "trajectory"
    _write_csv(os.path.join(out, f"{prefix}.csv"), ["t", "functional_id", "re", "im", "side"], _trajectory_rows(cfg, mode))
    fields = _write_fields(cfg, mode, out, prefix)
    _write_json(os.path.join(out, f"{prefix}.json"), {"mode": mode, "fields": fields, "config": cfg.normalized()})
    return EXIT_OK


def cmd_steady(cfg: ExperimentConfig, out: str, threads: int) -> int:
    return cmd_solve(cfg, out, threads, mode="steady")


def _hermitian_inputs(cfg: ExperimentConfig) -> bool:
    prob = cfg.problem
    parts = [m for m, _ in prob.source.terms]
    parts += [m for m in (prob.initial, prob.time_homogeneous) if m is not None]
    if any(not m.is_hermitian() for m in parts):
        return False
    pts = prob.frequencies()
    if pts.shape[0] == 0:
        return True
    return check_hermitian(prob.symbol, np.vstack([pts, -pts])).passed


def _verify_window(cfg: ExperimentConfig, mode: str):
    if cfg.verify["window"] is not None:
        return tuple(cfg.verify["window"])
    lo, hi = cfg.time_grid["from"], cfg.time_grid["to"]
    if mode == "cauchy" and lo <= 0:
        lo = 0.05 * hi
    elif mode == "duhamel":
        lo = max(lo, 0.0)
    return lo, hi


def cmd_verify(cfg: ExperimentConfig, out: str, threads: int) -> int:
    mode, prob = cfg.mode, cfg.problem
    check_mode(prob, mode)
    vopt = cfg.verify
    window = _verify_window(cfg, mode)
    pairs = vopt["increment_pairs"]
    if pairs is None:
        lo, hi = window
        pairs = [[lo + (hi - lo) * a, lo + (hi - lo) * b] for a, b in ((0.1, 0.4), (0.3, 0.9), (0.0, 1.0))]

    def per_functional(item):
        fid, f = item
        res = weak_residual(prob, mode, f, window, vopt["n_test"], vopt["corrupt_scale"])
        inc = []
        for s, t in pairs:
            lhs, rhs = increment_identity(prob, mode, f, s, t)
            inc.append({"s": s, "t": t, "lhs": complex(lhs), "rhs": complex(rhs), "error": abs(lhs - rhs)})
        inc_err = max((r["error"] for r in inc), default=0.0)
        return {
            "id": fid,
            "weak_residual": {
                "max_residual": res.max_residual,
                "residuals": list(res.residuals),
                "centers": list(res.centers),
                "tolerance": vopt["residual_tol"],
                "passed": res.max_residual <= vopt["residual_tol"],
            },
            "increment_identity": {
                "pairs": inc,
                "max_error": inc_err,
                "tolerance": vopt["increment_tol"],
                "passed": inc_err <= vopt["increment_tol"],
            },
        }

    functionals = _pmap(per_functional, list(cfg.functionals), threads)

    traj = Trajectory(prob, mode)
    lo = min(cfg.time_grid["from"], window[0])
    hi = max(cfg.time_grid["to"], window[1])
    jumps = []
    for t, jump in traj.jumps((lo, hi)):
        expected = prob.source.slice_at(t)
        if mode == "cauchy" and t == 0.0:
            expected = prob.initial
        err = (jump - expected).total_variation()
        scale = 1.0 + expected.total_variation()
        jumps.append({"t": t, "tv_error": err, "passed": err <= JUMP_TOL * scale})

    herm = {"applicable": False, "passed": True}
    if cfg.spatial_grid is not None and _hermitian_inputs(cfg):
        worst = 0.0
        for t in cfg.times():
            if mode != "steady" and t < 0:
                continue
            vals = synthesize_field(snapshot(prob, mode, t), cfg.spatial_grid).values
            peak = float(np.max(np.abs(vals)))
            if peak > 0:
                worst = max(worst, float(np.max(np.abs(vals.imag))) / peak)
        herm = {"applicable": True, "max_relative_imag": worst, "tolerance": HERMITIAN_FIELD_TOL, "passed": worst <= HERMITIAN_FIELD_TOL}

    passed = (
        all(r["weak_residual"]["passed"] and r["increment_identity"]["passed"] for r in functionals)
        and all(j["passed"] for j in jumps)
        and herm["passed"]
    )
    report = {
        "mode": mode,
        "window": list(window),
        "functionals": functionals,
        "jumps": jumps,
        "hermitian_field": herm,
        "passed": passed,
        "config": cfg.normalized(),
    }
    _write_json(os.path.join(out, "verify.json"), report)
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_asymptotics(cfg: ExperimentConfig, out: str, threads: int) -> int:
    prob = cfg.problem
    check_mode(prob, "steady")
    times = cfg.times()
    if times[0] < 0:
        raise ConfigError("time_grid.from", "asymptotics needs times >= 0")
    ids = [fid for fid, _ in cfg.functionals]
    reports = _pmap(lambda item: asy.verify_bound(prob, item[1], times), list(cfg.functionals), threads)
    summary = {"kappa_declared": prob.kappa(), "functionals": [], "config": cfg.normalized()}
    violations = 0
    for fid, (_, f), rep in zip(ids, cfg.functionals, reports):
        bounds = rep.bounds()[:, 0]
        rows = [[_fmt(t), _fmt(g), _fmt(b)] for t, g, b in zip(times, rep.gaps[:, 0], bounds)]
        _write_csv(os.path.join(out, f"asymptotics_{fid}.csv"), ["t", "gap", "bound"], rows)
        entry = {
            "id": fid,
            "c_phi": float(rep.c_phi[0]),
            "kappa_fitted": rep.kappa_fitted[0],
            "violations": rep.bound_violations,
            "t_epsilon": asy.t_epsilon(prob, f, cfg.asymptotics["eps"]),
            "eps": cfg.asymptotics["eps"],
        }
        if cfg.asymptotics["shifts"]:
            t_mid = float(times[len(times) // 2])
            sweep = asy.translation_sweep(prob, f, cfg.asymptotics["shifts"], t_mid)
            bound = float(rep.c_phi[0]) * math.exp(-prob.kappa() * t_mid) * (1 + asy.BOUND_SLACK)
            entry["translation_sweep"] = {"t": t_mid, "max_gap": sweep, "bound": bound, "passed": sweep <= bound}
            violations += int(sweep > bound)
        violations += rep.bound_violations
        summary["functionals"].append(entry)
    summary["violations"] = violations
    _write_json(os.path.join(out, "asymptotics.json"), summary)
    return EXIT_OK if violations == 0 else EXIT_VERIFY


def cmd_oracle_compare(cfg: ExperimentConfig, out: str, threads: int) -> int:
    prob, opt = cfg.problem, cfg.oracle
    mode = "cauchy" if prob.initial is not None else "duhamel"
    check_mode(prob, mode)
    t_end = opt["t_end"]
    if opt["method"] == "simpson":
        if mode != "duhamel":
            raise PreconditionError("the simpson oracle covers the duhamel solution only (drop the initial condition)", "initial")
        ref = quadrature_duhamel(prob, t_end, opt["n_panels"])
    else:
        ref = step_modal(prob, StepperConfig(opt["method"], opt["dt"], t_end))
    closed = closed_form_modal(prob, mode, t_end, ref.frequencies)
    rows = []
    for xi, c, o in zip(ref.frequencies, closed, ref.values):
        rows.append([_fmt(x) for x in xi] + [_fmt(c.real), _fmt(c.imag), _fmt(o.real), _fmt(o.imag), _fmt(abs(c - o))])
    header = [f"xi{a + 1}" for a in range(cfg.dimension)] + ["closed_re", "closed_im", "oracle_re", "oracle_im", "abs_err"]
    _write_csv(os.path.join(out, "oracle.csv"), header, rows)
    return EXIT_OK


def cmd_mollifier(cfg: ExperimentConfig, out: str, threads: int) -> int:
    mode = cfg.mode
    traj = Trajectory(cfg.problem, mode)
    times = cfg.mollifier["times"]
    if times is None:
        lo, hi = cfg.time_grid["from"], cfg.time_grid["to"]
        times = [float(t) for t in traj.schedule if lo <= t <= hi]
    depth = cfg.mollifier["depth"]
    for fid, f in cfg.functionals:
        for side in ("right", "left"):
            params = MollifierParams.depth(depth, side)
            rows = []
            for t in times:
                for a, v in traj.mollifier_pair(f, t, params):
                    rows.append([_fmt(t), _fmt(a), _fmt(v.real), _fmt(v.imag)])
            _write_csv(os.path.join(out, f"mollifier_{fid}_{side}.csv"), ["t", "a_n", "re", "im"], rows)
    return EXIT_OK


HANDLERS = {
    "solve": cmd_solve,
    "steady": cmd_steady,
    "verify": cmd_verify,
    "asymptotics": cmd_asymptotics,
    "oracle-compare": cmd_oracle_compare,
    "mollifier": cmd_mollifier,
}


def run(command: str, config_path, out_dir, threads: int = 1) -> int:
    """Run one command; returns the process exit code and reports errors on stderr."""
    try:
        cfg = load_config(config_path)
        os.makedirs(out_dir, exist_ok=True)
        return HANDLERS[command](cfg, out_dir, max(1, int(threads)))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        where = exc.field or "problem"
        print(f"precondition error: {where}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except EvolutionError as exc:
        print(f"precondition error: problem: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cadlag-evolution", description="Spectral solver for dU/dt + L_g U = X with measure data.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="experiment JSON file")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for per-functional work")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("config error: --threads: must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.command, args.config, args.out, args.threads)


if __name__ == "__main__":
    sys.exit(main())
