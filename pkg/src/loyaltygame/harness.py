"""Factorial parameter sweep, behavioral targets, synergy and Monte Carlo robustness.

The sweep works per *production combination* ``(omega, beta, c, n)``: each
combination is solved at every grid loyalty plus the auxiliary loyalties
0, 0.1 and 0.9 and the single-mechanism variants used for synergy.  A
combination is an independent work unit, so sweeps can be spread over
processes; results are always re-assembled in index order.

Effort for a configuration is the per-member effort of the symmetric
equilibrium returned by the solver (capped at the effort cap).  The uncapped
symmetric level is carried alongside and used only for reporting.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .equilibrium import (
    SolverSettings,
    analytic_symmetric_equilibrium,
    solve_tpe,
)
from .model import MechanismStrengths, TeamConfig, team_output
from .stats import bootstrap_mean_ci, cohens_d, paired_t_test

__all__ = [
    "GridSpec",
    "GridPoint",
    "SynergyResult",
    "ComboResult",
    "TargetReport",
    "SweepReport",
    "RobustnessReport",
    "PUBLISHED_REFERENCE",
    "TARGET_NAMES",
    "generate_grid",
    "production_combos",
    "increasing_until_cap",
    "synergy_ratio",
    "synergy_analysis",
    "effort_differentiation",
    "solve_combo",
    "evaluate_targets",
    "run_sweep",
    "monte_carlo_robustness",
]

TARGET_NAMES = (
    "free_riding_baseline",
    "loyalty_monotonicity",
    "effort_differentiation",
    "team_size_effect",
    "mechanism_synergy",
    "bounded_outcomes",
)

# Published headline numbers, reported next to ours and never asserted.
PUBLISHED_REFERENCE = {
    "target_fractions": {
        "free_riding_baseline": 0.965,
        "loyalty_monotonicity": 1.0,
        "effort_differentiation": 1.0,
        "team_size_effect": 1.0,
        "mechanism_synergy": 0.995,
        "bounded_outcomes": 1.0,
    },
    "median_differentiation": 15.04,
    "median_synergy_ratio": 1.55,
    "bootstrap_mean_differentiation": 18.39,
    "bootstrap_ci": [17.45, 19.37],
    "cohens_d": 0.71,
    "paired_t": 17.86,
    "monte_carlo": {
        "monotonic_fraction": 1.0,
        "differentiation_fraction": 0.411,
        "differentiation_mean": 2.70,
        "differentiation_std": 2.43,
    },
}

BASELINE_TOLERANCE = 0.05
DIFFERENTIATION_THRESHOLD = 2.0
SYNERGY_THRESHOLD = 1.1
LOW_LOYALTY = 0.3
_CAP_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Value lists swept in full factorial order (first list varies slowest)."""

    productivity: tuple[float, ...] = tuple(np.linspace(10.0, 30.0, 5))
    returns_exponent: tuple[float, ...] = tuple(np.linspace(0.40, 0.60, 5))
    effort_cost: tuple[float, ...] = tuple(np.linspace(1.5, 3.5, 5))
    team_size: tuple[int, ...] = (3, 4, 5, 6, 8)
    loyalty: tuple[float, ...] = tuple(np.linspace(0.0, 0.9, 5))
    loyalty_benefit: float = 0.8
    cost_tolerance: float = 0.3
    effort_cap: float = 10.0

    def __post_init__(self) -> None:
        for name in ("productivity", "returns_exponent", "effort_cost", "team_size", "loyalty"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} value list is empty")
            cast = int if name == "team_size" else float
            object.__setattr__(self, name, tuple(cast(v) for v in values))
        if any(not (0.0 <= t <= 1.0) for t in self.loyalty):
            raise ValueError("loyalty values must lie in [0, 1]")

    @property
    def mech(self) -> MechanismStrengths:
        return MechanismStrengths(self.loyalty_benefit, self.cost_tolerance)

    @property
    def size(self) -> int:
        return (
            len(self.productivity) * len(self.returns_exponent) * len(self.effort_cost)
            * len(self.team_size) * len(self.loyalty)
        )

    @property
    def loyalty_grid(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.loyalty)))

    def as_dict(self) -> dict:
        return {
            "productivity": list(self.productivity),
            "returns_exponent": list(self.returns_exponent),
            "effort_cost": list(self.effort_cost),
            "team_size": list(self.team_size),
            "loyalty": list(self.loyalty),
            "loyalty_benefit": self.loyalty_benefit,
            "cost_tolerance": self.cost_tolerance,
            "effort_cap": self.effort_cap,
        }


@dataclass(frozen=True)
class GridPoint:
    index: int
    config: TeamConfig
    loyalty: float


def production_combos(spec: GridSpec) -> list[TeamConfig]:
    return [
        TeamConfig(w, b, c, n, spec.effort_cap)
        for w, b, c, n in itertools.product(
            spec.productivity, spec.returns_exponent, spec.effort_cost, spec.team_size
        )
    ]


def generate_grid(spec: GridSpec) -> list[GridPoint]:
    """All configurations in deterministic factorial order."""
    points = []
    for i, (w, b, c, n, t) in enumerate(
        itertools.product(
            spec.productivity, spec.returns_exponent, spec.effort_cost, spec.team_size, spec.loyalty
        )
    ):
        points.append(GridPoint(i, TeamConfig(w, b, c, n, spec.effort_cap), t))
    return points


def _at_cap(x: float, cap: float) -> bool:
    return x >= cap * (1.0 - _CAP_RTOL)


def increasing_until_cap(values: Sequence[float], cap: float) -> bool:
    """Strictly increasing, except that consecutive values may both sit at the cap."""
    return all(
        b > a or (_at_cap(a, cap) and _at_cap(b, cap)) for a, b in zip(values, values[1:])
    )


def _decreasing_until_cap(values: Sequence[float], cap: float) -> bool:
    return all(
        b < a or (_at_cap(a, cap) and _at_cap(b, cap)) for a, b in zip(values, values[1:])
    )


def _symmetric_effort(config, mech, loyalty, settings) -> tuple[float, bool]:
    eq = solve_tpe(config, mech, loyalty, settings)
    return float(eq.profile.mean()), eq.converged


@dataclass(frozen=True)
class SynergyResult:
    baseline: float
    benefit_only: float
    cost_only: float
    combined: float
    ratio: float | None

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None

    def as_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "benefit_only": self.benefit_only,
            "cost_only": self.cost_only,
            "combined": self.combined,
            "synergy_ratio": self.ratio,
        }


def synergy_ratio(baseline: float, benefit_only: float, cost_only: float, combined: float) -> float | None:
    """Combined gain over the sum of solo gains; ``None`` when solo gains sum to <= 0."""
    denom = (benefit_only - baseline) + (cost_only - baseline)
    if denom <= 0:
        return None
    return (combined - baseline) / denom


def synergy_analysis(
    config: TeamConfig,
    loyalty: float,
    mech: MechanismStrengths,
    settings: SolverSettings | None = None,
) -> SynergyResult:
    if not (0.0 < loyalty <= 1.0):
        raise ValueError("synergy needs loyalty > 0")
    phi_b, phi_c = mech.loyalty_benefit, mech.cost_tolerance

    def effort(b, c):
        return _symmetric_effort(config, MechanismStrengths(b, c), loyalty, settings)[0]

    base = effort(0.0, 0.0)
    benefit = effort(phi_b, 0.0)
    cost = effort(0.0, phi_c)
    both = effort(phi_b, phi_c)
    return SynergyResult(base, benefit, cost, both, synergy_ratio(base, benefit, cost, both))


def effort_differentiation(
    config: TeamConfig,
    mech: MechanismStrengths,
    settings: SolverSettings | None = None,
    high: float = 0.9,
    low: float = 0.1,
) -> float:
    """Ratio of symmetric equilibrium efforts at high and low loyalty (``inf`` if the low one is 0)."""
    a_hi = _symmetric_effort(config, mech, high, settings)[0]
    a_lo = _symmetric_effort(config, mech, low, settings)[0]
    if a_lo == 0.0:
        return math.inf
    return a_hi / a_lo


@dataclass
class ComboResult:
    """Everything solved for one production combination."""

    index: int
    config: TeamConfig
    loyalties: tuple[float, ...]
    efforts: tuple[float, ...]
    uncapped: tuple[float, ...]
    outputs: tuple[float, ...]
    utilities: tuple[float, ...]
    converged: tuple[bool, ...]
    baseline_effort: float
    baseline_analytic: float
    baseline_printed: float
    effort_low: float
    effort_high: float
    differentiation: float
    differentiation_uncapped: float
    synergy: tuple[SynergyResult, ...]
    low_loyalty_efforts: tuple[tuple[float, float], ...] = field(default_factory=tuple)


def solve_combo(
    index: int,
    config: TeamConfig,
    spec: GridSpec,
    settings: SolverSettings | None = None,
) -> ComboResult:
    mech = spec.mech
    efforts, uncapped, outputs, utils, conv = [], [], [], [], []
    for t in spec.loyalty:
        eq = solve_tpe(config, mech, t, settings)
        efforts.append(float(eq.profile.mean()))
        uncapped.append(analytic_symmetric_equilibrium(config, mech, t, clamp=False))
        outputs.append(team_output(config, eq.profile))
        utils.append(float(eq.utilities.mean()))
        conv.append(eq.converged)

    base, ok0 = _symmetric_effort(config, mech, 0.0, settings)
    lo, ok1 = _symmetric_effort(config, mech, 0.1, settings)
    hi, ok2 = _symmetric_effort(config, mech, 0.9, settings)
    conv.extend([ok0, ok1, ok2])
    syn = tuple(synergy_analysis(config, t, mech, settings) for t in spec.loyalty if t > 0)
    low_pairs = tuple(
        (t, _symmetric_effort(config, mech, t, settings)[0])
        for t in sorted(set(spec.loyalty) | {0.0, 0.1})
        if t < LOW_LOYALTY
    )
    u_hi = analytic_symmetric_equilibrium(config, mech, 0.9, clamp=False)
    u_lo = analytic_symmetric_equilibrium(config, mech, 0.1, clamp=False)
    return ComboResult(
        index=index,
        config=config,
        loyalties=tuple(spec.loyalty),
        efforts=tuple(efforts),
        uncapped=tuple(uncapped),
        outputs=tuple(outputs),
        utilities=tuple(utils),
        converged=tuple(conv),
        baseline_effort=base,
        baseline_analytic=analytic_symmetric_equilibrium(config, mech, 0.0),
        baseline_printed=analytic_symmetric_equilibrium(config, mech, 0.0, variant="printed"),
        effort_low=lo,
        effort_high=hi,
        differentiation=hi / lo if lo > 0 else math.inf,
        differentiation_uncapped=u_hi / u_lo,
        synergy=syn,
        low_loyalty_efforts=low_pairs,
    )


@dataclass
class TargetReport:
    """Fraction of evaluated units meeting each target plus per-unit detail.

    ``detail[name]`` maps a unit key (combo index, or a tuple for grouped
    targets) to its boolean outcome.
    """

    fractions: dict[str, float]
    counts: dict[str, tuple[int, int]]
    detail: dict[str, dict]
    baseline_printed_fraction: float

    def as_dict(self) -> dict:
        return {
            "fractions": dict(self.fractions),
            "counts": {k: list(v) for k, v in self.counts.items()},
            "baseline_printed_variant_fraction": self.baseline_printed_fraction,
        }


def _within(actual: float, reference: float, tol: float) -> bool:
    return reference > 0 and abs(actual - reference) / reference < tol


def evaluate_targets(results: Sequence[ComboResult]) -> TargetReport:
    if not results:
        raise ValueError("no results to evaluate")
    detail: dict[str, dict] = {name: {} for name in TARGET_NAMES}
    printed_hits = 0
    for r in results:
        if not r.low_loyalty_efforts or len(r.synergy) != sum(t > 0 for t in r.loyalties):
            raise ValueError(f"combo {r.index} is missing auxiliary solutions")
        cap = r.config.effort_cap
        detail["free_riding_baseline"][r.index] = _within(
            r.baseline_effort, r.baseline_analytic, BASELINE_TOLERANCE
        )
        printed_hits += _within(r.baseline_effort, r.baseline_printed, BASELINE_TOLERANCE)
        order = np.argsort(r.loyalties, kind="stable")
        detail["loyalty_monotonicity"][r.index] = increasing_until_cap(
            [r.efforts[i] for i in order], cap
        )
        detail["effort_differentiation"][r.index] = r.differentiation > DIFFERENTIATION_THRESHOLD
        positive = [t for t in r.loyalties if t > 0]
        for t, s in zip(positive, r.synergy):
            detail["mechanism_synergy"][(r.index, t)] = (
                s.ratio is not None and s.ratio > SYNERGY_THRESHOLD
            )
        efforts = list(r.efforts) + [r.baseline_effort, r.effort_low, r.effort_high]
        efforts += [e for _, e in r.low_loyalty_efforts]
        for s in r.synergy:
            efforts += [s.baseline, s.benefit_only, s.cost_only, s.combined]
        detail["bounded_outcomes"][r.index] = all(0.0 <= e <= cap for e in efforts)

    # team size: hold (omega, beta, c, theta) fixed and walk n upward
    groups: dict[tuple, list[tuple[int, float]]] = {}
    for r in results:
        c = r.config
        for t, e in r.low_loyalty_efforts:
            key = (c.productivity, c.returns_exponent, c.effort_cost, c.effort_cap, t)
            groups.setdefault(key, []).append((c.team_size, e))
    for key, pairs in sorted(groups.items()):
        pairs.sort()
        if len(pairs) < 2:
            continue
        detail["team_size_effect"][key] = _decreasing_until_cap([e for _, e in pairs], key[3])

    fractions, counts = {}, {}
    for name in TARGET_NAMES:
        values = list(detail[name].values())
        hits = sum(bool(v) for v in values)
        counts[name] = (hits, len(values))
        fractions[name] = hits / len(values) if values else float("nan")
    return TargetReport(fractions, counts, detail, printed_hits / len(results))


def _solve_chunk(args) -> list[ComboResult]:
    items, spec, settings = args
    return [solve_combo(i, cfg, spec, settings) for i, cfg in items]


def _map_combos(spec: GridSpec, settings, workers: int) -> list[ComboResult]:
    combos = list(enumerate(production_combos(spec)))
    if workers <= 1:
        return _solve_chunk((combos, spec, settings))
    chunks = [combos[k::workers * 4] for k in range(workers * 4)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_solve_chunk, [(c, spec, settings) for c in chunks if c])
        results = [r for part in parts for r in part]
    return sorted(results, key=lambda r: r.index)


@dataclass
class SweepReport:
    spec: GridSpec
    combos: list[ComboResult]
    targets: TargetReport
    statistics: dict

    ROW_COLUMNS = (
        "config_index",
        "combo_index",
        "productivity",
        "returns_exponent",
        "effort_cost",
        "team_size",
        "loyalty",
        "effort",
        "effort_uncapped",
        "output",
        "utility",
        "converged",
        *(f"target_{name}" for name in TARGET_NAMES),
    )

    def rows(self) -> Iterable[dict]:
        """One row per (configuration, loyalty) in grid order."""
        t = self.targets.detail
        n_theta = len(self.spec.loyalty)
        size_by_group: dict[tuple, dict[float, bool]] = {}
        for key, ok in t["team_size_effect"].items():
            size_by_group.setdefault(key[:4], {})[key[4]] = ok
        for r in self.combos:
            c = r.config
            size = size_by_group.get(
                (c.productivity, c.returns_exponent, c.effort_cost, c.effort_cap), {}
            )
            for j, theta in enumerate(r.loyalties):
                if theta in size:
                    size_ok = size[theta]
                else:
                    size_ok = all(size.values()) if size else None
                yield {
                    "config_index": r.index * n_theta + j,
                    "combo_index": r.index,
                    "productivity": c.productivity,
                    "returns_exponent": c.returns_exponent,
                    "effort_cost": c.effort_cost,
                    "team_size": c.team_size,
                    "loyalty": theta,
                    "effort": r.efforts[j],
                    "effort_uncapped": r.uncapped[j],
                    "output": r.outputs[j],
                    "utility": r.utilities[j],
                    "converged": r.converged[j],
                    "target_free_riding_baseline": t["free_riding_baseline"][r.index],
                    "target_loyalty_monotonicity": t["loyalty_monotonicity"][r.index],
                    "target_effort_differentiation": t["effort_differentiation"][r.index],
                    "target_team_size_effect": size_ok,
                    "target_mechanism_synergy": t["mechanism_synergy"].get((r.index, theta)),
                    "target_bounded_outcomes": 0.0 <= r.efforts[j] <= c.effort_cap,
                }

    def summary(self) -> dict:
        return {
            "grid": self.spec.as_dict(),
            "configurations": self.spec.size,
            "production_combinations": len(self.combos),
            "targets": self.targets.as_dict(),
            "statistics": self.statistics,
            "published_reference": PUBLISHED_REFERENCE,
        }


def _sweep_statistics(combos: Sequence[ComboResult], seed: int) -> dict:
    diff = np.array([r.differentiation for r in combos])
    diff_u = np.array([r.differentiation_uncapped for r in combos])
    finite = diff[np.isfinite(diff)]
    ratios = np.array([s.ratio for r in combos for s in r.synergy if s.ratio is not None])
    hi = np.array([r.effort_high for r in combos])
    lo = np.array([r.effort_low for r in combos])
    out = {
        "median_differentiation": float(np.median(diff)),
        "median_differentiation_uncapped": float(np.median(diff_u)),
        "min_differentiation": float(diff.min()),
        "max_differentiation": float(diff.max()),
        "median_synergy_ratio": float(np.median(ratios)) if ratios.size else None,
        "baseline_mape": float(
            np.mean([abs(r.baseline_effort - r.baseline_analytic) / r.baseline_analytic for r in combos])
        ),
        "all_converged": bool(all(all(r.converged) for r in combos)),
    }
    if finite.size >= 1:
        out["bootstrap_mean_differentiation"] = bootstrap_mean_ci(
            finite, resamples=10_000, confidence=0.95, seed=seed
        ).as_dict()
    if len(combos) >= 2:
        try:
            t, p = paired_t_test(hi, lo)
            out["paired_t_high_vs_low"] = {"t": t, "p": p}
        except ValueError:
            out["paired_t_high_vs_low"] = None
        try:
            out["cohens_d_high_vs_low"] = cohens_d(hi, lo)
        except ValueError:
            out["cohens_d_high_vs_low"] = None
    return out


def run_sweep(
    spec: GridSpec | None = None,
    settings: SolverSettings | None = None,
    workers: int = 1,
    seed: int = 0,
) -> SweepReport:
    spec = spec or GridSpec()
    combos = _map_combos(spec, settings, workers)
    targets = evaluate_targets(combos)
    return SweepReport(spec, combos, targets, _sweep_statistics(combos, seed))


@dataclass(frozen=True)
class RobustnessReport:
    trials: int
    noise_fraction: float
    seed: int
    monotonic_fraction: float
    differentiation_fraction: float
    differentiation_mean: float
    differentiation_std: float
    differentiation: tuple[float, ...] = field(repr=False)
    monotonic: tuple[bool, ...] = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "noise_fraction": self.noise_fraction,
            "seed": self.seed,
            "monotonic_fraction": self.monotonic_fraction,
            "differentiation_fraction": self.differentiation_fraction,
            "differentiation_mean": self.differentiation_mean,
            "differentiation_std": self.differentiation_std,
            "published_reference": PUBLISHED_REFERENCE["monte_carlo"],
        }


def _trial(args) -> tuple[bool, float]:
    trial, seed, noise, base, spec, settings = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
    f = rng.uniform(1.0 - noise, 1.0 + noise, size=7)
    cfg = TeamConfig(
        base.productivity * f[0],
        min(max(base.returns_exponent * f[1], 0.01), 0.99),
        base.effort_cost * f[2],
        base.team_size,
        base.effort_cap,
    )
    mech = MechanismStrengths(
        spec.loyalty_benefit * f[3], min(max(spec.cost_tolerance * f[4], 0.0), 0.99)
    )
    low = min(max(0.1 * f[5], 0.0), 1.0)
    high = min(max(0.9 * f[6], 0.0), 1.0)
    efforts = [_symmetric_effort(cfg, mech, t, settings)[0] for t in spec.loyalty_grid]
    mono = increasing_until_cap(efforts, cfg.effort_cap)
    return mono, effort_differentiation(cfg, mech, settings, high=high, low=low)


def monte_carlo_robustness(
    spec: GridSpec | None = None,
    noise_fraction: float = 0.15,
    trials: int = 2000,
    seed: int = 0,
    *,
    base: TeamConfig | None = None,
    settings: SolverSettings | None = None,
    workers: int = 1,
) -> RobustnessReport:
    """Perturb the default configuration and re-check monotonicity and differentiation.

    Each trial multiplies omega, beta, c, phi_B, phi_C and the two
    differentiation loyalties by independent ``U[1 - noise, 1 + noise]``
    factors; team size is left alone.  Trial ``k`` draws from its own
    stream spawned from ``seed``, so results do not depend on scheduling.
    """
    spec = spec or GridSpec()
    if not (0.0 <= noise_fraction < 1.0):
        raise ValueError("noise_fraction must lie in [0, 1)")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = base or TeamConfig(effort_cap=spec.effort_cap)
    jobs = [(k, seed, noise_fraction, base, spec, settings) for k in range(trials)]
    if workers <= 1:
        out = [_trial(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_trial, jobs, chunksize=max(1, trials // (workers * 4))))
    mono = tuple(m for m, _ in out)
    diff = np.array([d for _, d in out])
    return RobustnessReport(
        trials=trials,
        noise_fraction=noise_fraction,
        seed=seed,
        monotonic_fraction=sum(mono) / trials,
        differentiation_fraction=float(np.mean(diff > DIFFERENTIATION_THRESHOLD)),
        differentiation_mean=float(diff.mean()),
        differentiation_std=float(diff.std(ddof=1)) if trials > 1 else 0.0,
        differentiation=tuple(float(d) for d in diff),
        monotonic=mono,
    )
