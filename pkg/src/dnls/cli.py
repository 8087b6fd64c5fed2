"""Command-line front end: solve, sweep, homoclinic, check-potential, oracle, evolve.

Every command writes plot-ready JSON/CSV artifacts plus a run manifest.
Exit codes: 0 success, 1 usage or validation error, 2 operational failure
(e.g. non-convergence). Identical flags produce byte-identical artifacts
except for the wall time recorded in the manifest. The environment variable
DNLS_THREADS caps sweep parallelism (default 1, sequential).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import EvolutionState, integrate, relative_equilibrium_check
from .functionals import participation_ratio
from .lattice import IndexScheme, profile_to_csv
from .potentials import check_assumptions, parse_potential_spec
from .solver import ConeGuard, SolverConfig, homoclinic, oracle_maximize, solve

USAGE_ERROR = 1
OPERATIONAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _write_manifest(out: Path, command: str, config: dict, outputs, started: float) -> None:
    manifest = {
        "command": command,
        "config": config,
        "outputs": [str(o) for o in outputs],
        "wall_time": time.time() - started,
        "tool_version": __version__,
    }
    _dump_json(manifest, Path(str(out) + ".manifest.json"))


def _add_solver_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--potential", default="saturable-arctan",
                    help="catalog name or power:eta=<r>,c=<r>")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--scheme", choices=["onsite", "intersite"], default=None)
    sp.add_argument("--N", type=int, default=None, dest="n")
    sp.add_argument("--tau", type=float, default=None)
    sp.add_argument("--tol-residual", type=float, default=None)
    sp.add_argument("--tol-step", type=float, default=None)
    sp.add_argument("--max-iters", type=int, default=None)
    sp.add_argument("--cone-guard", choices=["off", "monitor", "project"], default=None)
    sp.add_argument("--no-backtracking", action="store_true")
    sp.add_argument("--ansatz-samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--config", default=None,
                    help="JSON file mirroring the solver config field names")
    sp.add_argument("--out", default="wave", help="output path prefix")


def _config_from_args(args) -> SolverConfig:
    base = SolverConfig(alpha=1.0, rho=1.0)
    if args.config:
        data = json.loads(Path(args.config).read_text())
        base = SolverConfig.from_dict({**base.to_dict(), **data})
    overrides = {}
    for attr, key in [("alpha", "alpha"), ("rho", "rho"), ("n", "n"), ("tau", "tau"),
                      ("tol_residual", "tol_residual"), ("tol_step", "tol_step"),
                      ("max_iters", "max_iters"), ("ansatz_samples", "ansatz_samples"),
                      ("seed", "seed")]:
        val = getattr(args, attr)
        if val is not None:
            overrides[key] = val
    if args.scheme is not None:
        overrides["scheme"] = IndexScheme(args.scheme)
    if args.cone_guard is not None:
        overrides["cone_guard"] = ConeGuard(args.cone_guard)
    if args.no_backtracking:
        overrides["backtracking"] = False
    return replace(base, **overrides)


def _solve_outputs(sol, cfg: SolverConfig, out: Path):
    json_path = Path(str(out) + ".json")
    csv_path = Path(str(out) + ".profile.csv")
    _dump_json(sol.to_dict(cfg), json_path)
    profile_to_csv(sol.profile, csv_path)
    return [json_path, csv_path]


def cmd_solve(args) -> int:
    started = time.time()
    cfg = _config_from_args(args)
    try:
        cfg.validate()
        potential = parse_potential_spec(args.potential)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    sol = solve(cfg, potential)
    out = Path(args.out)
    outputs = _solve_outputs(sol, cfg, out)
    _write_manifest(out, "solve", cfg.to_dict(), outputs, started)
    print(f"converged={sol.converged} sigma={sol.sigma:.12g} "
          f"residual={sol.residual:.3e} iterations={sol.iterations}")
    if not sol.converged:
        print(f"did not converge: stop={sol.diagnostics.stop_reason} "
              f"residual={sol.residual:.3e} after {sol.iterations} iterations",
              file=sys.stderr)
        return OPERATIONAL_ERROR
    return 0


def _sweep_grid(args):
    if args.values:
        return [float(x) for x in args.values.split(",") if x.strip()]
    if args.start is None or args.stop is None or args.step is None:
        return []
    if args.step <= 0:
        return []
    count = int(round((args.stop - args.start) / args.step)) + 1
    grid = [args.start + k * args.step for k in range(count)]
    return [g for g in grid if g <= args.stop + 1e-12 * max(1.0, abs(args.stop))]


def cmd_sweep(args) -> int:
    started = time.time()
    base = _config_from_args(args)
    try:
        potential = parse_potential_spec(args.potential)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    grid = _sweep_grid(args)
    if not grid:
        print("error: empty sweep grid", file=sys.stderr)
        return USAGE_ERROR

    def cfg_for(value) -> SolverConfig:
        if args.param == "N":
            return replace(base, n=int(round(value)))
        return replace(base, **{args.param: value})

    def run_one(value):
        cfg = cfg_for(value)
        cfg.validate()
        return solve(cfg, potential)

    workers = int(os.environ.get("DNLS_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, grid))
    else:
        results = [run_one(v) for v in grid]

    out = Path(args.out)
    outputs = []
    rows = []
    for value, sol in zip(grid, results):
        tag = f"{args.param}={value:g}"
        point_path = Path(f"{out}.{tag}.json")
        _dump_json(sol.to_dict(cfg_for(value)), point_path)
        outputs.append(point_path)
        rows.append([
            repr(float(value)),
            repr(float(sol.sigma)),
            repr(float(sol.energies.p_total)),
            repr(float(sol.energies.t_value)),
            repr(float(sol.residual)),
            repr(float(np.max(sol.profile.values))),
            repr(float(participation_ratio(sol.profile))),
        ])
    summary = Path(f"{out}.summary.csv")
    with open(summary, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "sigma", "p_total", "t_value", "residual",
                         "max_u", "participation_ratio"])
        writer.writerows(rows)
    outputs.append(summary)
    _write_manifest(out, "sweep", {**base.to_dict(), "sweep": args.param,
                                   "grid": grid}, outputs, started)
    n_conv = sum(1 for s in results if s.converged)
    print(f"sweep over {args.param}: {n_conv}/{len(grid)} points converged; "
          f"summary at {summary}")
    return 0 if n_conv >= 1 else OPERATIONAL_ERROR


def cmd_homoclinic(args) -> int:
    started = time.time()
    cfg = _config_from_args(args)
    try:
        potential = parse_potential_spec(args.potential)
        n_seq = [int(x) for x in args.n_seq.split(",") if x.strip()]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    result = homoclinic(cfg, potential, n_seq, margin=args.margin)
    out = Path(args.out)
    outputs = []
    for n, sol, rest in zip(result.n_sequence, result.solutions, result.restricted):
        point = Path(f"{out}.N={n}.json")
        _dump_json(sol.to_dict(replace(cfg, n=n)), point)
        prof = Path(f"{out}.N={n}.restricted.csv")
        profile_to_csv(rest, prof)
        outputs.extend([point, prof])
    summary = Path(str(out) + ".json")
    _dump_json(result.to_dict(), summary)
    outputs.append(summary)
    _write_manifest(out, "homoclinic", {**cfg.to_dict(), "n_sequence": n_seq},
                    outputs, started)
    print(f"verdict={result.verdict.value} t_values={result.t_values}")
    return 0 if all(s.converged for s in result.solutions) else OPERATIONAL_ERROR


def cmd_check_potential(args) -> int:
    started = time.time()
    try:
        potential = parse_potential_spec(args.potential)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    report = check_assumptions(potential, x_max=args.x_max, samples=args.samples)
    out = Path(args.out)
    path = Path(str(out) + ".json")
    _dump_json({"potential": potential.label, **report.to_dict()}, path)
    _write_manifest(out, "check-potential",
                    {"potential": args.potential, "x_max": args.x_max,
                     "samples": args.samples}, [path], started)
    print(f"{potential.label}: {'passed' if report.passed else 'FAILED'} "
          f"({len(report.violations)} violations)")
    return 0 if report.passed else OPERATIONAL_ERROR


def cmd_oracle(args) -> int:
    started = time.time()
    cfg = _config_from_args(args)
    try:
        cfg.validate()
        if cfg.n > 4:
            raise ValueError("the oracle covers N <= 4 only")
        potential = parse_potential_spec(args.potential)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    best, p_best = oracle_maximize(cfg, potential, grid_points=args.grid_points)
    sol = solve(cfg, potential)
    gap = abs(sol.energies.p_total - p_best) / max(abs(p_best), 1e-300)
    out = Path(args.out)
    json_path = Path(str(out) + ".json")
    csv_path = Path(str(out) + ".profile.csv")
    _dump_json({
        "config": cfg.to_dict(),
        "oracle_p": p_best,
        "solver_p": sol.energies.p_total,
        "relative_gap": gap,
        "profile_sup_diff": float(np.max(np.abs(best.values - sol.profile.values))),
    }, json_path)
    profile_to_csv(best, csv_path)
    _write_manifest(out, "oracle", {**cfg.to_dict(), "grid_points": args.grid_points},
                    [json_path, csv_path], started)
    print(f"oracle P={p_best:.12g} solver P={sol.energies.p_total:.12g} gap={gap:.2e}")
    return 0


def cmd_evolve(args) -> int:
    started = time.time()
    cfg = _config_from_args(args)
    try:
        cfg.validate()
        potential = parse_potential_spec(args.potential)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    sol = solve(cfg, potential)
    if not sol.converged:
        print("solver did not converge; nothing to evolve", file=sys.stderr)
        return OPERATIONAL_ERROR

    out = Path(args.out)
    series_path = Path(str(out) + ".series.csv")
    indices = sol.profile.cell.indices()
    stride = max(args.sample_every, 1)
    with open(series_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "j", "re", "im", "abs"])

        def sample(step, t, amps):
            if step % stride:
                return
            for j, a in zip(indices, amps):
                writer.writerow([repr(float(t)), f"{j:g}", repr(a.real),
                                 repr(a.imag), repr(abs(a))])

        state = EvolutionState.from_profile(sol.profile)
        integrate(state, potential, cfg.alpha, args.t_end, args.dt, callback=sample)

    report = relative_equilibrium_check(sol, potential, cfg.alpha, args.t_end, args.dt)
    json_path = Path(str(out) + ".json")
    _dump_json({"config": cfg.to_dict(), "sigma": sol.sigma, **report.to_dict()},
               json_path)
    _write_manifest(out, "evolve", {**cfg.to_dict(), "t_end": args.t_end,
                                    "dt": args.dt}, [series_path, json_path], started)
    print(f"modulus_drift={report.modulus_drift:.3e} "
          f"sigma_mismatch={report.sigma_mismatch:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dnls", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="compute one standing wave")
    _add_solver_flags(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="solve over a parameter grid")
    _add_solver_flags(sp)
    sp.add_argument("--param", choices=["rho", "alpha", "N"], required=True)
    sp.add_argument("--values", default=None, help="comma-separated grid values")
    sp.add_argument("--from", dest="start", type=float, default=None)
    sp.add_argument("--to", dest="stop", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("homoclinic", help="periodic-to-homoclinic continuation")
    _add_solver_flags(sp)
    sp.add_argument("--N-seq", dest="n_seq", required=True,
                    help="comma-separated increasing cell sizes")
    sp.add_argument("--margin", type=float, default=1e-3)
    sp.set_defaults(func=cmd_homoclinic)

    sp = sub.add_parser("check-potential", help="verify growth assumptions")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--x-max", type=float, default=100.0)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--out", default="potential-check")
    sp.set_defaults(func=cmd_check_potential)

    sp = sub.add_parser("oracle", help="brute-force maximum on tiny cells")
    _add_solver_flags(sp)
    sp.add_argument("--grid-points", type=int, default=100_000)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("evolve", help="validate a wave as a relative equilibrium")
    _add_solver_flags(sp)
    sp.add_argument("--t-end", type=float, default=10.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--sample-every", type=int, default=100)
    sp.set_defaults(func=cmd_evolve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OPERATIONAL_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
