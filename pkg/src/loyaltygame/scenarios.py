"""Scenario files, case-study phases and counterfactuals.

Scenario files are JSON documents with a ``schema_version`` field (currently
1).  See ``docs/formats.md`` for the full schema.  Three scenarios ship with
the package: ``team_t`` (a six-person software team), ``system_s`` (five
cooperating agents) and ``apache`` (four historical project phases).

Phase efforts are reported twice: capped at the effort cap (the feasible
equilibrium) and uncapped (the symmetric first-order-condition level).
Rank-based comparisons use the uncapped level, because with a cap of 10
several phases saturate and their ordering is lost.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .equilibrium import SolverSettings, analytic_symmetric_equilibrium, solve_tpe
from .extended import ExtendedStrengths
from .model import MechanismStrengths, TeamConfig, team_output
from .stats import _average_ranks, pearson_r, spearman_rho
from .translation import (
    AGENT_WEIGHTS,
    HUMAN_WEIGHTS,
    DependencyRecord,
    FactorWeights,
    MemberFactors,
    dependency_coefficients,
    loyalty_score,
    team_cohesion,
)

__all__ = [
    "SCHEMA_VERSION",
    "BUILTIN_SCENARIOS",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioSchemaError",
    "ScenarioInvariantError",
    "Phase",
    "Scenario",
    "PhaseResult",
    "CaseStudyReport",
    "Counterfactual",
    "load_scenario",
    "load_builtin",
    "resolve_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "dump_scenario",
    "run_case_study",
    "run_counterfactual",
    "score_rubric",
]

SCHEMA_VERSION = 1
BUILTIN_SCENARIOS = ("team_t", "system_s", "apache")
WEIGHT_PRESETS = {"human": HUMAN_WEIGHTS, "agent": AGENT_WEIGHTS}


class ScenarioError(ValueError):
    """Base class for scenario loading failures."""


class ScenarioParseError(ScenarioError):
    """The file is not well-formed JSON."""


class ScenarioSchemaError(ScenarioError):
    """A key is missing, unknown or of the wrong type."""


class ScenarioInvariantError(ScenarioError):
    """Values are well-typed but violate a model invariant."""


@dataclass(frozen=True)
class Phase:
    name: str
    overrides: tuple[tuple[str, float], ...]
    mean_loyalty: float
    expected_rank: int
    reference: tuple[tuple[str, float], ...] = ()

    def config(self, base: TeamConfig) -> TeamConfig:
        return base.replace(**dict(self.overrides))


@dataclass(frozen=True)
class Scenario:
    name: str
    config: TeamConfig
    mech: MechanismStrengths | ExtendedStrengths
    loyalty_profile: tuple[float, ...] | None = None
    member_ids: tuple[str, ...] | None = None
    weights: FactorWeights | None = None
    weights_preset: str | None = None
    members: tuple[MemberFactors, ...] | None = None
    dependencies: tuple[DependencyRecord, ...] = ()
    dependency_weights: tuple[tuple[str, float], ...] = ()
    phases: tuple[Phase, ...] = ()
    description: str = ""
    reference: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def consolidated_mech(self) -> MechanismStrengths:
        if isinstance(self.mech, ExtendedStrengths):
            return MechanismStrengths(self.mech.internalization, self.mech.cost_tolerance)
        return self.mech

    def ids(self) -> tuple[str, ...]:
        if self.members is not None:
            return tuple(m.member_id for m in self.members)
        if self.member_ids is not None:
            return self.member_ids
        return tuple(f"m{i + 1}" for i in range(self.config.team_size))

    def loyalties(self, *, use_override: bool = True) -> np.ndarray:
        """Per-member loyalty, from the explicit profile or the factor table."""
        if self.loyalty_profile is not None:
            return np.array(self.loyalty_profile, dtype=float)
        return np.array(
            [loyalty_score(m, self.weights, use_override=use_override) for m in self.members]
        )

    def cohesion(self) -> float | None:
        """Dependency-weighted mean loyalty, if any dependency data is present."""
        if self.dependency_weights:
            weights = dict(self.dependency_weights)
        elif self.dependencies:
            weights = dependency_coefficients(self.dependencies)
        else:
            return None
        loyal = dict(zip(self.ids(), self.loyalties()))
        weights = {k: weights.get(k, 0.0) for k in loyal}
        return team_cohesion(weights, loyal)


# ---------------------------------------------------------------- parsing


def _require(obj: Mapping, key: str, path: str, kind=None):
    if not isinstance(obj, Mapping):
        raise ScenarioSchemaError(f"{path}: expected an object")
    if key not in obj:
        raise ScenarioSchemaError(f"{path}: missing required key '{key}'")
    return _typed(obj[key], f"{path}.{key}", kind)


def _typed(value, path: str, kind):
    if kind is None:
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioSchemaError(f"{path}: expected a number, got {type(value).__name__}")
        if not math.isfinite(value):
            raise ScenarioSchemaError(f"{path}: expected a finite number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioSchemaError(f"{path}: expected an integer")
        return value
    if not isinstance(value, kind):
        raise ScenarioSchemaError(f"{path}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _no_extra(obj: Mapping, allowed: set[str], path: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise ScenarioSchemaError(f"{path}: unknown keys {sorted(extra)}")


def _invariant(fn, path: str):
    try:
        return fn()
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioInvariantError(f"{path}: {exc}") from exc


_CONFIG_KEYS = ("productivity", "returns_exponent", "effort_cost", "team_size", "effort_cap")


def _parse_config(obj, path) -> TeamConfig:
    _no_extra(obj, set(_CONFIG_KEYS), path)
    kw = {k: _require(obj, k, path, int if k == "team_size" else float) for k in _CONFIG_KEYS}
    return _invariant(lambda: TeamConfig(**kw), path)


def _parse_mech(doc, path):
    has_basic = "mechanisms" in doc
    has_ext = "extended_mechanisms" in doc
    if has_basic == has_ext:
        raise ScenarioSchemaError(
            f"{path}: exactly one of 'mechanisms' or 'extended_mechanisms' is required"
        )
    if has_basic:
        obj = _typed(doc["mechanisms"], f"{path}.mechanisms", dict)
        _no_extra(obj, {"loyalty_benefit", "cost_tolerance"}, f"{path}.mechanisms")
        b = _require(obj, "loyalty_benefit", f"{path}.mechanisms", float)
        c = _require(obj, "cost_tolerance", f"{path}.mechanisms", float)
        return _invariant(lambda: MechanismStrengths(b, c), f"{path}.mechanisms")
    obj = _typed(doc["extended_mechanisms"], f"{path}.extended_mechanisms", dict)
    keys = ("internalization", "warm_glow", "cost_tolerance", "guilt")
    _no_extra(obj, set(keys), f"{path}.extended_mechanisms")
    kw = {k: _require(obj, k, f"{path}.extended_mechanisms", float) for k in keys}
    return _invariant(lambda: ExtendedStrengths(**kw), f"{path}.extended_mechanisms")


def _parse_loyalty(obj, config: TeamConfig, path):
    _no_extra(obj, {"profile", "member_ids", "weights", "members"}, path)
    has_profile = "profile" in obj
    has_members = "members" in obj
    if has_profile == has_members:
        raise ScenarioSchemaError(f"{path}: exactly one of 'profile' or 'members' is required")
    out: dict[str, Any] = {}
    if has_profile:
        if "weights" in obj:
            raise ScenarioSchemaError(f"{path}: 'weights' only applies with 'members'")
        raw = _typed(obj["profile"], f"{path}.profile", list)
        values = tuple(_typed(v, f"{path}.profile[{i}]", float) for i, v in enumerate(raw))
        if len(values) != config.team_size:
            raise ScenarioInvariantError(
                f"{path}.profile: {len(values)} values for team_size {config.team_size}"
            )
        if any(not (0.0 <= v <= 1.0) for v in values):
            raise ScenarioInvariantError(f"{path}.profile: loyalty values must lie in [0, 1]")
        out["loyalty_profile"] = values
        if "member_ids" in obj:
            ids = _typed(obj["member_ids"], f"{path}.member_ids", list)
            ids = tuple(_typed(v, f"{path}.member_ids[{i}]", str) for i, v in enumerate(ids))
            if len(ids) != len(values) or len(set(ids)) != len(ids):
                raise ScenarioInvariantError(f"{path}.member_ids: must be {len(values)} unique ids")
            out["member_ids"] = ids
        return out

    if "member_ids" in obj:
        raise ScenarioSchemaError(f"{path}: 'member_ids' only applies with 'profile'")
    w = _require(obj, "weights", path)
    if isinstance(w, str):
        if w not in WEIGHT_PRESETS:
            raise ScenarioSchemaError(f"{path}.weights: unknown preset {w!r}")
        out["weights"] = WEIGHT_PRESETS[w]
        out["weights_preset"] = w
    else:
        w = _typed(w, f"{path}.weights", dict)
        pairs = tuple((k, _typed(v, f"{path}.weights.{k}", float)) for k, v in w.items())
        out["weights"] = _invariant(lambda: FactorWeights(pairs), f"{path}.weights")
    raw = _typed(obj["members"], f"{path}.members", list)
    members = []
    for i, m in enumerate(raw):
        mp = f"{path}.members[{i}]"
        m = _typed(m, mp, dict)
        _no_extra(m, {"id", "scores", "override"}, mp)
        mid = _require(m, "id", mp, str)
        scores = _require(m, "scores", mp, dict)
        pairs = tuple((k, _typed(v, f"{mp}.scores.{k}", float)) for k, v in scores.items())
        override = m.get("override")
        if override is not None:
            override = _typed(override, f"{mp}.override", float)
        member = _invariant(lambda: MemberFactors(mid, pairs, override), mp)
        _invariant(lambda: loyalty_score(member, out["weights"]), mp)
        members.append(member)
    if len(members) != config.team_size:
        raise ScenarioInvariantError(
            f"{path}.members: {len(members)} members for team_size {config.team_size}"
        )
    if len({m.member_id for m in members}) != len(members):
        raise ScenarioInvariantError(f"{path}.members: duplicate member ids")
    out["members"] = tuple(members)
    return out


def _parse_phases(raw, config: TeamConfig, path) -> tuple[Phase, ...]:
    raw = _typed(raw, path, list)
    phases = []
    for i, p in enumerate(raw):
        pp = f"{path}[{i}]"
        p = _typed(p, pp, dict)
        _no_extra(p, {"name", "overrides", "mean_loyalty", "expected_rank", "reference"}, pp)
        name = _require(p, "name", pp, str)
        ov = _typed(p.get("overrides", {}), f"{pp}.overrides", dict)
        _no_extra(ov, set(_CONFIG_KEYS), f"{pp}.overrides")
        overrides = tuple(
            (k, _typed(v, f"{pp}.overrides.{k}", int if k == "team_size" else float))
            for k, v in ov.items()
        )
        theta = _require(p, "mean_loyalty", pp, float)
        rank = _require(p, "expected_rank", pp, int)
        ref = _typed(p.get("reference", {}), f"{pp}.reference", dict)
        reference = tuple((k, _typed(v, f"{pp}.reference.{k}", float)) for k, v in ref.items())
        phase = Phase(name, overrides, theta, rank, reference)
        _invariant(lambda: phase.config(config), f"{pp}.overrides")
        if not (0.0 <= theta <= 1.0):
            raise ScenarioInvariantError(f"{pp}.mean_loyalty: must lie in [0, 1]")
        phases.append(phase)
    ranks = sorted(p.expected_rank for p in phases)
    if ranks != list(range(1, len(phases) + 1)):
        raise ScenarioInvariantError(f"{path}: expected ranks {ranks} are not a permutation of 1..{len(phases)}")
    if len({p.name for p in phases}) != len(phases):
        raise ScenarioInvariantError(f"{path}: duplicate phase names")
    return tuple(phases)


_TOP_KEYS = {
    "schema_version", "name", "description", "config", "mechanisms", "extended_mechanisms",
    "loyalty", "dependencies", "dependency_weights", "phases", "reference",
}


def scenario_from_dict(doc: Mapping, source: str = "<scenario>") -> Scenario:
    if not isinstance(doc, Mapping):
        raise ScenarioSchemaError(f"{source}: top level must be an object")
    _no_extra(doc, _TOP_KEYS, source)
    version = _require(doc, "schema_version", source, int)
    if version != SCHEMA_VERSION:
        raise ScenarioSchemaError(f"{source}: unsupported schema_version {version}")
    name = _require(doc, "name", source, str)
    config = _parse_config(_require(doc, "config", source, dict), f"{source}.config")
    mech = _parse_mech(doc, source)
    loyalty = _parse_loyalty(_require(doc, "loyalty", source, dict), config, f"{source}.loyalty")

    deps = []
    for i, d in enumerate(_typed(doc.get("dependencies", []), f"{source}.dependencies", list)):
        dp = f"{source}.dependencies[{i}]"
        d = _typed(d, dp, dict)
        _no_extra(d, {"dependee", "dependum", "criticality"}, dp)
        rec = (
            _require(d, "dependee", dp, str),
            _require(d, "dependum", dp, str),
            _require(d, "criticality", dp, float),
        )
        deps.append(_invariant(lambda: DependencyRecord(*rec), dp))

    dw_raw = _typed(doc.get("dependency_weights", {}), f"{source}.dependency_weights", dict)
    dw = tuple(
        (k, _typed(v, f"{source}.dependency_weights.{k}", float)) for k, v in dw_raw.items()
    )
    if any(v < 0 for _, v in dw):
        raise ScenarioInvariantError(f"{source}.dependency_weights: weights must be >= 0")

    phases = _parse_phases(doc.get("phases", []), config, f"{source}.phases")
    scenario = Scenario(
        name=name,
        config=config,
        mech=mech,
        dependencies=tuple(deps),
        dependency_weights=dw,
        phases=phases,
        description=_typed(doc.get("description", ""), f"{source}.description", str),
        reference=_typed(doc.get("reference", {}), f"{source}.reference", dict),
        **loyalty,
    )
    ids = set(scenario.ids())
    unknown = {k for k, _ in dw} - ids
    if unknown:
        raise ScenarioInvariantError(f"{source}.dependency_weights: unknown members {sorted(unknown)}")
    unknown = {d.dependee for d in deps} - ids
    if unknown:
        raise ScenarioInvariantError(f"{source}.dependencies: unknown dependees {sorted(unknown)}")
    return scenario


def scenario_to_dict(s: Scenario) -> dict:
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "name": s.name}
    if s.description:
        doc["description"] = s.description
    doc["config"] = {k: getattr(s.config, k) for k in _CONFIG_KEYS}
    if isinstance(s.mech, ExtendedStrengths):
        doc["extended_mechanisms"] = {
            "internalization": s.mech.internalization,
            "warm_glow": s.mech.warm_glow,
            "cost_tolerance": s.mech.cost_tolerance,
            "guilt": s.mech.guilt,
        }
    else:
        doc["mechanisms"] = {
            "loyalty_benefit": s.mech.loyalty_benefit,
            "cost_tolerance": s.mech.cost_tolerance,
        }
    if s.loyalty_profile is not None:
        loyalty: dict[str, Any] = {"profile": list(s.loyalty_profile)}
        if s.member_ids is not None:
            loyalty["member_ids"] = list(s.member_ids)
    else:
        loyalty = {
            "weights": s.weights_preset if s.weights_preset else s.weights.as_dict(),
            "members": [
                {"id": m.member_id, "scores": m.as_dict(), **({"override": m.override} if m.override is not None else {})}
                for m in s.members
            ],
        }
    doc["loyalty"] = loyalty
    if s.dependencies:
        doc["dependencies"] = [
            {"dependee": d.dependee, "dependum": d.dependum, "criticality": d.criticality}
            for d in s.dependencies
        ]
    if s.dependency_weights:
        doc["dependency_weights"] = dict(s.dependency_weights)
    if s.phases:
        doc["phases"] = [
            {
                "name": p.name,
                "overrides": dict(p.overrides),
                "mean_loyalty": p.mean_loyalty,
                "expected_rank": p.expected_rank,
                **({"reference": dict(p.reference)} if p.reference else {}),
            }
            for p in s.phases
        ]
    if s.reference:
        doc["reference"] = dict(s.reference)
    return doc


def _parse_text(text: str, source: str) -> Scenario:
    if not text.strip():
        raise ScenarioParseError(f"{source}: file is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc, source)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ScenarioParseError(f"{path}: not UTF-8 text") from exc
    return _parse_text(text, str(path))


def load_builtin(name: str) -> Scenario:
    if name not in BUILTIN_SCENARIOS:
        raise ScenarioError(f"unknown built-in scenario {name!r}; choose from {BUILTIN_SCENARIOS}")
    text = resources.files("loyaltygame.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return _parse_text(text, f"builtin:{name}")


def resolve_scenario(name_or_path: str) -> Scenario:
    """A built-in scenario name, or a path to a scenario file."""
    if name_or_path in BUILTIN_SCENARIOS and not Path(name_or_path).exists():
        return load_builtin(name_or_path)
    return load_scenario(name_or_path)


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


# ------------------------------------------------------------ case studies


@dataclass(frozen=True)
class PhaseResult:
    name: str
    team_size: int
    mean_loyalty: float
    expected_rank: int
    effort: float
    effort_uncapped: float
    total_effort: float
    total_effort_uncapped: float
    output: float
    output_uncapped: float
    converged: bool
    residual: float
    capped: bool
    reference: Mapping[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "team_size": self.team_size,
            "mean_loyalty": self.mean_loyalty,
            "expected_rank": self.expected_rank,
            "effort": self.effort,
            "effort_uncapped": self.effort_uncapped,
            "total_effort": self.total_effort,
            "total_effort_uncapped": self.total_effort_uncapped,
            "output": self.output,
            "output_uncapped": self.output_uncapped,
            "converged": self.converged,
            "residual": self.residual,
            "capped": self.capped,
            "reference": dict(self.reference),
        }


@dataclass(frozen=True)
class CaseStudyReport:
    scenario: str
    phases: tuple[PhaseResult, ...]
    spearman_effort: float | None
    spearman_total: float | None
    pearson: tuple[float, float] | None
    strictly_decreasing: bool
    rubric: dict

    @property
    def correlation_defined(self) -> bool:
        return self.spearman_effort is not None

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "phases": [p.as_dict() for p in self.phases],
            "spearman_effort_vs_expected_rank": self.spearman_effort,
            "spearman_total_vs_expected_rank": self.spearman_total,
            "pearson_effort_vs_rank": (
                {"r": self.pearson[0], "p": self.pearson[1]} if self.pearson else None
            ),
            "strictly_decreasing": self.strictly_decreasing,
            "rubric": self.rubric,
        }

    def series_rows(self) -> list[dict]:
        return [
            {
                "phase": p.name,
                "effort": p.effort,
                "effort_uncapped": p.effort_uncapped,
                "cohesion": p.mean_loyalty,
                "loyalty": p.mean_loyalty,
            }
            for p in self.phases
        ]


def _solve_phase(phase: Phase, base: TeamConfig, mech: MechanismStrengths, settings) -> PhaseResult:
    cfg = phase.config(base)
    eq = solve_tpe(cfg, mech, phase.mean_loyalty, settings)
    a = float(eq.profile.mean())
    u = analytic_symmetric_equilibrium(cfg, mech, phase.mean_loyalty, clamp=False)
    n = cfg.team_size
    return PhaseResult(
        name=phase.name,
        team_size=n,
        mean_loyalty=phase.mean_loyalty,
        expected_rank=phase.expected_rank,
        effort=a,
        effort_uncapped=u,
        total_effort=float(eq.profile.sum()),
        total_effort_uncapped=u * n,
        output=team_output(cfg, eq.profile),
        output_uncapped=cfg.productivity * (u * n) ** cfg.returns_exponent,
        converged=eq.converged,
        residual=eq.residual,
        capped=u > cfg.effort_cap,
        reference=dict(phase.reference),
    )


def _safe_spearman(x, y) -> float | None:
    if len(x) < 2:
        return None
    try:
        return spearman_rho(x, y)
    except ValueError:
        return None


def score_rubric(phases: tuple[PhaseResult, ...]) -> dict:
    """Automated 60-point style checklist (3/4/4/4 points per phase).

    * convergence: the equilibrium solver converged;
    * magnitude: the phase's predicted rank equals its expected rank;
    * pattern: the direction of change into the phase (out of it, for the
      first phase) matches the expected direction;
    * trend: share of the other phases whose pairwise ordering agrees.

    Predictions are the uncapped per-member efforts.
    """
    k = len(phases)
    effort = np.array([p.effort_uncapped for p in phases])
    expected = np.array([p.expected_rank for p in phases], dtype=float)
    predicted = _average_ranks(effort) if k else effort
    rows = []
    for i, p in enumerate(phases):
        conv = 3.0 if p.converged else 0.0
        mag = 4.0 if predicted[i] == expected[i] else 0.0
        if k < 2:
            pattern = trend = 0.0
        else:
            j = i - 1 if i > 0 else 1
            lo, hi = (j, i) if i > 0 else (i, j)
            pattern = 4.0 if np.sign(effort[hi] - effort[lo]) == np.sign(expected[hi] - expected[lo]) else 0.0
            agree = sum(
                np.sign(effort[i] - effort[m]) == np.sign(expected[i] - expected[m])
                for m in range(k) if m != i
            )
            trend = 4.0 * agree / (k - 1)
        rows.append(
            {
                "phase": p.name,
                "convergence": conv,
                "magnitude_ranking": mag,
                "pattern_matching": pattern,
                "trend_consistency": trend,
                "total": conv + mag + pattern + trend,
            }
        )
    return {
        "per_phase": rows,
        "score": float(sum(r["total"] for r in rows)),
        "max_score": 15.0 * k,
    }


def run_case_study(scenario: Scenario, settings: SolverSettings | None = None) -> CaseStudyReport:
    if not scenario.phases:
        raise ScenarioError(f"scenario {scenario.name!r} has no phases")
    mech = scenario.consolidated_mech
    phases = tuple(_solve_phase(p, scenario.config, mech, settings) for p in scenario.phases)
    effort = [p.effort_uncapped for p in phases]
    totals = [p.total_effort_uncapped for p in phases]
    ranks = [p.expected_rank for p in phases]
    pearson = None
    if len(phases) >= 3:
        try:
            pearson = pearson_r(effort, ranks)
        except ValueError:
            pearson = None
    return CaseStudyReport(
        scenario=scenario.name,
        phases=phases,
        spearman_effort=_safe_spearman(effort, ranks),
        spearman_total=_safe_spearman(totals, ranks),
        pearson=pearson,
        strictly_decreasing=len(effort) >= 2 and all(b < a for a, b in zip(effort, effort[1:])),
        rubric=score_rubric(phases),
    )


# ---------------------------------------------------------- counterfactuals


@dataclass(frozen=True)
class Counterfactual:
    """One what-if modification.

    kind:
        ``scale_mechanisms``: multiply both mechanism strengths by ``magnitude``
            (1 is the identity);
        ``cap_team_size``: limit every phase's team size to ``magnitude``;
        ``shift_loyalty``: add ``magnitude`` to mean loyalty (clipped to 1),
            restricted to ``phases`` when given.
    """

    kind: str
    magnitude: float
    phases: tuple[str, ...] = ()

    KINDS = ("scale_mechanisms", "cap_team_size", "shift_loyalty")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown counterfactual {self.kind!r}; choose from {self.KINDS}")
        if self.kind == "scale_mechanisms" and self.magnitude < 0:
            raise ValueError("mechanism scale must be >= 0")
        if self.kind == "cap_team_size" and (self.magnitude < 2 or int(self.magnitude) != self.magnitude):
            raise ValueError("team size cap must be an integer >= 2")

    @classmethod
    def parse(cls, text: str) -> "Counterfactual":
        """Parse ``kind:magnitude[@phase,phase]``."""
        head, _, phases = text.partition("@")
        kind, sep, mag = head.partition(":")
        if not sep:
            raise ValueError(f"counterfactual {text!r} must look like kind:magnitude")
        try:
            value = float(mag)
        except ValueError as exc:
            raise ValueError(f"bad magnitude in {text!r}") from exc
        names = tuple(p for p in phases.split(",") if p) if phases else ()
        return cls(kind, value, names)

    @property
    def expectation(self) -> str:
        return {
            "scale_mechanisms": "per-member effort falls when strengths shrink",
            "cap_team_size": "per-member effort rises, total output falls",
            "shift_loyalty": "per-member effort rises",
        }[self.kind]

    def apply(self, scenario: Scenario) -> Scenario:
        mech = scenario.consolidated_mech
        if self.kind == "scale_mechanisms":
            scaled = MechanismStrengths(
                mech.loyalty_benefit * self.magnitude,
                min(mech.cost_tolerance * self.magnitude, 0.99),
            )
            return replace(scenario, mech=scaled)
        new_phases = []
        for p in scenario.phases:
            if self.phases and p.name not in self.phases:
                new_phases.append(p)
                continue
            if self.kind == "cap_team_size":
                n = p.config(scenario.config).team_size
                if n > self.magnitude:
                    ov = dict(p.overrides)
                    ov["team_size"] = int(self.magnitude)
                    p = replace(p, overrides=tuple(ov.items()))
            else:
                p = replace(p, mean_loyalty=min(1.0, max(0.0, p.mean_loyalty + self.magnitude)))
            new_phases.append(p)
        return replace(scenario, phases=tuple(new_phases))


def _pct(new: float, old: float) -> float | None:
    return None if old == 0 else 100.0 * (new - old) / old


def run_counterfactual(
    scenario: Scenario, modifier: Counterfactual, settings: SolverSettings | None = None
) -> dict:
    """Baseline versus modified phase efforts, with directional checks."""
    if not scenario.phases:
        raise ScenarioError(f"scenario {scenario.name!r} has no phases")
    unknown = set(modifier.phases) - {p.name for p in scenario.phases}
    if unknown:
        raise ScenarioError(f"unknown phases {sorted(unknown)}")
    base_mech = scenario.consolidated_mech
    cf_scenario = modifier.apply(scenario)
    cf_mech = cf_scenario.consolidated_mech
    rows = []
    for p0, p1 in zip(scenario.phases, cf_scenario.phases):
        b = _solve_phase(p0, scenario.config, base_mech, settings)
        c = _solve_phase(p1, scenario.config, cf_mech, settings)
        changed = p0 != p1 or base_mech != cf_mech
        rows.append(
            {
                "phase": p0.name,
                "affected": changed,
                "baseline": b.as_dict(),
                "counterfactual": c.as_dict(),
                "effort_change_pct": _pct(c.effort, b.effort),
                "effort_uncapped_change_pct": _pct(c.effort_uncapped, b.effort_uncapped),
                "output_change_pct": _pct(c.output, b.output),
                "checks": _direction_checks(modifier, b, c) if changed else {},
            }
        )
    return {
        "scenario": scenario.name,
        "modifier": {
            "kind": modifier.kind,
            "magnitude": modifier.magnitude,
            "phases": list(modifier.phases),
        },
        "expectation": modifier.expectation,
        "phases": rows,
    }


def _direction_checks(mod: Counterfactual, b: PhaseResult, c: PhaseResult) -> dict:
    if mod.kind == "scale_mechanisms":
        lower = mod.magnitude < 1
        sign = (lambda x, y: x < y) if lower else (lambda x, y: x > y)
        weak = (lambda x, y: x <= y) if lower else (lambda x, y: x >= y)
        return {
            "effort_direction_capped": weak(c.effort, b.effort),
            "effort_direction_uncapped": sign(c.effort_uncapped, b.effort_uncapped),
        }
    if mod.kind == "cap_team_size":
        return {
            "effort_not_lower_capped": c.effort >= b.effort,
            "effort_higher_capped": c.effort > b.effort,
            "effort_higher_uncapped": c.effort_uncapped > b.effort_uncapped,
            "output_lower_capped": c.output < b.output,
            "output_lower_uncapped": c.output_uncapped < b.output_uncapped,
        }
    raise_ = mod.magnitude > 0
    return {
        "effort_not_lower_capped": c.effort >= b.effort if raise_ else c.effort <= b.effort,
        "effort_direction_uncapped": (
            c.effort_uncapped > b.effort_uncapped if raise_ else c.effort_uncapped < b.effort_uncapped
        ),
    }
