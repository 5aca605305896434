"""Command-line entry point: ``loyaltygame <subcommand>``.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime or
convergence error.  Every file is written to a temporary sibling first and
renamed into place, so an interrupted run never leaves a partial file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .dynamics import DynamicsSettings, classify_regime, simulate_loyalty_evolution
from .equilibrium import SolverSettings, analytic_symmetric_equilibrium, solve_tpe
from .harness import GridSpec, monte_carlo_robustness, run_sweep, synergy_analysis
from .model import MechanismStrengths, TeamConfig
from .scenarios import Counterfactual, ScenarioError, resolve_scenario, run_case_study, run_counterfactual

log = logging.getLogger("loyaltygame")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: error: {message}")


# ------------------------------------------------------------------ output


def _clean(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"
    return str(value)


def to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, files: dict[str, str]) -> None:
    """Build every output in memory first, then move each into place."""
    if args.output_dir is None:
        return
    out = Path(args.output_dir)
    for name, text in files.items():
        atomic_write(out / name, text)
        log.info("wrote %s", out / name)


# ------------------------------------------------------------- arguments


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_model_args(p: argparse.ArgumentParser) -> None:
    d = TeamConfig()
    m = MechanismStrengths()
    g = p.add_argument_group("model parameters")
    g.add_argument("--productivity", type=float, default=d.productivity)
    g.add_argument("--returns-exponent", type=float, default=d.returns_exponent)
    g.add_argument("--effort-cost", type=float, default=d.effort_cost)
    g.add_argument("--team-size", type=int, default=d.team_size)
    g.add_argument("--effort-cap", type=float, default=d.effort_cap)
    g.add_argument("--loyalty-benefit", type=float, default=m.loyalty_benefit)
    g.add_argument("--cost-tolerance", type=float, default=m.cost_tolerance)


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--tolerance", type=float, default=1e-6)
    g.add_argument("--max-iterations", type=int, default=10_000)
    g.add_argument("--method", choices=("grouped", "gauss-seidel"), default="grouped")


def _add_output_dir(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output-dir", default=None, help="directory for report files")


def _model(args) -> tuple[TeamConfig, MechanismStrengths]:
    config = TeamConfig(
        productivity=args.productivity,
        returns_exponent=args.returns_exponent,
        effort_cost=args.effort_cost,
        team_size=args.team_size,
        effort_cap=args.effort_cap,
    )
    return config, MechanismStrengths(args.loyalty_benefit, args.cost_tolerance)


def _solver(args) -> SolverSettings:
    return SolverSettings(
        tolerance=args.tolerance, max_iterations=args.max_iterations, method=args.method
    )


# -------------------------------------------------------------- commands


def cmd_solve(args) -> int:
    if args.scenario:
        scenario = resolve_scenario(args.scenario)
        config, mech = scenario.config, scenario.consolidated_mech
        loyalties = scenario.loyalties(use_override=not args.formula_loyalty)
        ids = scenario.ids()
    else:
        config, mech = _model(args)
        loyalties = args.loyalty if args.loyalty is not None else [0.0]
        if len(loyalties) == 1:
            loyalties = loyalties * config.team_size
        ids = tuple(f"m{i + 1}" for i in range(config.team_size))
    eq = solve_tpe(config, mech, loyalties, _solver(args))
    report = {
        "config": asdict(config),
        "mechanisms": {"loyalty_benefit": mech.loyalty_benefit, "cost_tolerance": mech.cost_tolerance},
        "members": list(ids),
        "equilibrium": eq.as_dict(),
        "total_effort": eq.total_effort,
    }
    if np.all(eq.loyalties == eq.loyalties[0]):
        report["analytic_symmetric_effort"] = analytic_symmetric_equilibrium(
            config, mech, float(eq.loyalties[0])
        )
    text = to_json(report)
    _emit(args, {"equilibrium.json": text})
    if args.json:
        sys.stdout.write(text)
    else:
        print(f"{'member':<10} {'loyalty':>8} {'effort':>12} {'utility':>12}")
        for mid, t, a, u in zip(ids, eq.loyalties, eq.profile, eq.utilities):
            print(f"{mid:<10} {t:>8.4f} {a:>12.6f} {u:>12.6f}")
        status = "converged" if eq.converged else "NOT converged"
        print(f"total effort {eq.total_effort:.6f}; {status} after {eq.iterations} sweeps "
              f"(residual {eq.residual:.2e})")
    if not eq.converged:
        print("error: best-response iteration did not converge", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_sweep(args) -> int:
    d = GridSpec()
    spec = GridSpec(
        productivity=args.productivity or d.productivity,
        returns_exponent=args.returns_exponent or d.returns_exponent,
        effort_cost=args.effort_cost or d.effort_cost,
        team_size=args.team_size or d.team_size,
        loyalty=args.loyalty or d.loyalty,
        loyalty_benefit=args.loyalty_benefit,
        cost_tolerance=args.cost_tolerance,
        effort_cap=args.effort_cap,
    )
    report = run_sweep(spec, _solver(args), workers=args.workers, seed=args.seed)
    summary = report.summary()
    files = {
        "sweep.csv": to_csv(report.rows(), report.ROW_COLUMNS),
        "sweep_summary.json": to_json(summary),
    }
    _emit(args, files)
    print(f"{'target':<26} {'fraction':>9}")
    for name, frac in summary["targets"]["fractions"].items():
        print(f"{name:<26} {frac:>9.4f}")
    if not summary["statistics"].get("all_converged", True):
        print("error: some equilibria did not converge", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_robustness(args) -> int:
    report = monte_carlo_robustness(
        noise_fraction=args.noise, trials=args.trials, seed=args.seed, workers=args.workers
    ).as_dict()
    _emit(args, {"robustness.json": to_json(report)})
    for k in ("trials", "noise_fraction", "seed", "monotonic_fraction", "differentiation_fraction",
              "differentiation_mean", "differentiation_std"):
        print(f"{k:<26} {report[k]}")
    return EXIT_OK


def cmd_dynamics(args) -> int:
    config, mech = _model(args)
    settings = DynamicsSettings(args.periods, args.rate, args.target)
    initial: Any = args.initial
    if args.jitter > 0:
        rng = np.random.default_rng(args.seed)
        initial = np.clip(args.initial + rng.uniform(-args.jitter, args.jitter, config.team_size), 0, 1)
    traj = simulate_loyalty_evolution(config, mech, initial, settings, _solver(args))
    means = traj.mean_loyalty()
    summary = {
        "periods": settings.periods,
        "learning_rate": settings.learning_rate,
        "output_target": traj.output_target,
        "seed": args.seed,
        "initial_mean_loyalty": float(means[0]),
        "final_mean_loyalty": float(means[-1]),
        "regime": classify_regime(traj),
        "all_converged": traj.all_converged,
        "mean_loyalty": means,
        "output": traj.outputs(),
    }
    _emit(args, {
        "trajectory.csv": to_csv(traj.rows(), ("period", "member", "loyalty", "effort", "output")),
        "dynamics.json": to_json(summary),
    })
    print(f"regime {summary['regime']}: mean loyalty {means[0]:.4f} -> {means[-1]:.4f} "
          f"(output target {traj.output_target:.4f})")
    return EXIT_OK if traj.all_converged else EXIT_RUNTIME


def cmd_case_study(args) -> int:
    scenario = resolve_scenario(args.scenario)
    settings = _solver(args)
    report = run_case_study(scenario, settings)
    out = report.as_dict()
    out["counterfactuals"] = [
        run_counterfactual(scenario, Counterfactual.parse(cf), settings) for cf in args.counterfactual
    ]
    _emit(args, {
        "case_study.json": to_json(out),
        "case_study_series.csv": to_csv(
            report.series_rows(), ("phase", "effort", "effort_uncapped", "cohesion", "loyalty")
        ),
    })
    print(f"{'phase':<12} {'n':>4} {'loyalty':>8} {'effort':>10} {'uncapped':>12} {'rank':>5}")
    for p in report.phases:
        print(f"{p.name:<12} {p.team_size:>4} {p.mean_loyalty:>8.3f} {p.effort:>10.4f} "
              f"{p.effort_uncapped:>12.4f} {p.expected_rank:>5}")
    rho = "undefined" if report.spearman_effort is None else f"{report.spearman_effort:.4f}"
    print(f"spearman {rho}; strictly decreasing {report.strictly_decreasing}; "
          f"rubric {report.rubric['score']:g}/{report.rubric['max_score']:g}")
    for cf in out["counterfactuals"]:
        m = cf["modifier"]
        print(f"counterfactual {m['kind']}({m['magnitude']:g}): {cf['expectation']}")
        for row in cf["phases"]:
            if row["affected"]:
                print(f"  {row['phase']:<12} effort {_pct(row['effort_change_pct'])} "
                      f"uncapped {_pct(row['effort_uncapped_change_pct'])} "
                      f"output {_pct(row['output_change_pct'])}")
    if not all(p.converged for p in report.phases):
        return EXIT_RUNTIME
    return EXIT_OK


def _pct(x: float | None) -> str:
    return "n/a" if x is None else f"{x:+.1f}%"


def cmd_synergy(args) -> int:
    config, mech = _model(args)
    res = synergy_analysis(config, args.loyalty, mech, _solver(args))
    d = res.as_dict()
    d["loyalty"] = args.loyalty
    _emit(args, {"synergy.json": to_json(d)})
    print(f"{'mechanisms':<22} {'effort':>12}")
    for label, key in (("none", "baseline"), ("loyalty benefit only", "benefit_only"),
                       ("cost tolerance only", "cost_only"), ("both", "combined")):
        print(f"{label:<22} {d[key]:>12.6f}")
    ratio = "undefined" if res.ratio is None else f"{res.ratio:.4f}"
    print(f"synergy ratio {ratio}")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loyaltygame", description="Loyalty in team production games.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one equilibrium")
    p.add_argument("--scenario", help="built-in scenario name or scenario file")
    p.add_argument("--formula-loyalty", action="store_true",
                   help="use weighted factor scores instead of per-member overrides")
    p.add_argument("--loyalty", type=_floats, help="one value, or one per member")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    _add_model_args(p)
    _add_solver_args(p)
    _add_output_dir(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run the validation grid")
    p.add_argument("--productivity", type=_floats)
    p.add_argument("--returns-exponent", type=_floats)
    p.add_argument("--effort-cost", type=_floats)
    p.add_argument("--team-size", type=_ints)
    p.add_argument("--loyalty", type=_floats)
    p.add_argument("--loyalty-benefit", type=float, default=0.8)
    p.add_argument("--cost-tolerance", type=float, default=0.3)
    p.add_argument("--effort-cap", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_solver_args(p)
    _add_output_dir(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("robustness", help="Monte Carlo parameter perturbation")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--noise", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_output_dir(p)
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("dynamics", help="loyalty evolution over repeated play")
    p.add_argument("--initial", type=float, default=0.6)
    p.add_argument("--periods", type=int, default=50)
    p.add_argument("--rate", type=float, default=0.02)
    p.add_argument("--target", type=float, default=None, help="output target (default: midpoint rule)")
    p.add_argument("--jitter", type=float, default=0.0, help="uniform spread of initial loyalties")
    p.add_argument("--seed", type=int, default=0)
    _add_model_args(p)
    _add_solver_args(p)
    _add_output_dir(p)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("case-study", help="phase-wise case study")
    p.add_argument("scenario", help="built-in scenario name or scenario file")
    p.add_argument("--counterfactual", action="append", default=[],
                   metavar="KIND:MAGNITUDE[@PHASE,...]")
    _add_solver_args(p)
    _add_output_dir(p)
    p.set_defaults(func=cmd_case_study)

    p = sub.add_parser("synergy", help="mechanism decomposition for one configuration")
    p.add_argument("--loyalty", type=float, default=0.5)
    _add_model_args(p)
    _add_solver_args(p)
    _add_output_dir(p)
    p.set_defaults(func=cmd_synergy)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
