"""Loyalty scoring, dependency coefficients, cohesion and loyalty gaps.

These turn organizational data (factor scores per member, dependency records
with criticalities) into the loyalty and weighting inputs used by the model.
Member identifiers are opaque strings; outputs keyed by member are returned
in lexicographic id order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = [
    "FactorWeights",
    "MemberFactors",
    "DependencyRecord",
    "HUMAN_WEIGHTS",
    "AGENT_WEIGHTS",
    "INTERVENTION_GAP",
    "tenure_score",
    "loyalty_score",
    "goal_weight_loyalty",
    "dependency_coefficients",
    "team_cohesion",
    "effective_bargaining_power",
    "loyalty_gap",
    "needs_intervention",
]

INTERVENTION_GAP = 0.3


@dataclass(frozen=True)
class FactorWeights:
    """Ordered ``(factor, weight)`` pairs summing to one."""

    weights: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        weights = tuple((str(k), float(w)) for k, w in self.weights)
        object.__setattr__(self, "weights", weights)
        names = [k for k, _ in weights]
        if not names:
            raise ValueError("at least one factor is required")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate factor names in {names}")
        if any(not (0.0 <= w <= 1.0) for _, w in weights):
            raise ValueError("factor weights must lie in [0, 1]")
        total = math.fsum(w for _, w in weights)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"factor weights must sum to 1, got {total}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "FactorWeights":
        return cls(tuple(mapping.items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.weights)

    def as_dict(self) -> dict[str, float]:
        return dict(self.weights)


# Human team calibration: tenure, social integration, role criticality, commitment.
HUMAN_WEIGHTS = FactorWeights(
    (("tenure", 0.30), ("social", 0.35), ("criticality", 0.20), ("commitment", 0.15))
)
# Agent calibration: training alignment, architecture integration, objective overlap, history.
AGENT_WEIGHTS = FactorWeights(
    (("training", 0.35), ("architecture", 0.30), ("objective", 0.20), ("history", 0.15))
)


@dataclass(frozen=True)
class MemberFactors:
    """Factor scores for one member, with an optional externally assessed loyalty.

    ``override`` replaces the weighted-sum score when present (used where a
    published assessment adjusts the formula value).
    """

    member_id: str
    scores: tuple[tuple[str, float], ...]
    override: float | None = None

    def __post_init__(self) -> None:
        scores = tuple((str(k), float(v)) for k, v in self.scores)
        object.__setattr__(self, "scores", scores)
        names = [k for k, _ in scores]
        if len(set(names)) != len(names):
            raise ValueError(f"{self.member_id}: duplicate factor names {names}")
        for k, v in scores:
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{self.member_id}: score {k}={v} outside [0, 1]")
        if self.override is not None and not (0.0 <= self.override <= 1.0):
            raise ValueError(f"{self.member_id}: override {self.override} outside [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return dict(self.scores)


@dataclass(frozen=True)
class DependencyRecord:
    dependee: str
    dependum: str
    criticality: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.criticality <= 1.0):
            raise ValueError(f"criticality {self.criticality} outside [0, 1]")


def tenure_score(months: float, horizon: float = 24.0) -> float:
    """Tenure normalized to [0, 1], saturating after ``horizon`` months."""
    if months < 0:
        raise ValueError("months must be >= 0")
    return min(1.0, months / horizon)


def loyalty_score(
    factors: MemberFactors, weights: FactorWeights, *, use_override: bool = False
) -> float:
    """Weighted sum of factor scores.

    Raises ``KeyError`` if the member's factors do not match the weight set
    exactly.
    """
    if use_override and factors.override is not None:
        return factors.override
    scores = factors.as_dict()
    missing = set(weights.names) - set(scores)
    extra = set(scores) - set(weights.names)
    if missing or extra:
        raise KeyError(
            f"{factors.member_id}: missing factors {sorted(missing)}, unexpected {sorted(extra)}"
        )
    value = math.fsum(w * scores[k] for k, w in weights.weights)
    return min(1.0, max(0.0, value))


def goal_weight_loyalty(team_weight: float, self_weight: float) -> float:
    """Loyalty read off goal weights: share of weight placed on team goals."""
    if team_weight < 0 or self_weight < 0 or team_weight + self_weight <= 0:
        raise ValueError("goal weights must be non-negative with a positive sum")
    return team_weight / (team_weight + self_weight)


def dependency_coefficients(records: Iterable[DependencyRecord]) -> dict[str, float]:
    """Share of total criticality carried by each dependee."""
    records = list(records)
    if not records:
        raise ValueError("no dependency records")
    total = math.fsum(r.criticality for r in records)
    if total <= 0:
        raise ValueError("total criticality is zero")
    sums: dict[str, list[float]] = {}
    for r in records:
        sums.setdefault(r.dependee, []).append(r.criticality)
    return {k: math.fsum(sums[k]) / total for k in sorted(sums)}


def team_cohesion(
    dependency_weights: Mapping[str, float], loyalties: Mapping[str, float]
) -> float:
    """Dependency-weighted mean loyalty."""
    if set(dependency_weights) != set(loyalties):
        raise ValueError(
            "member sets differ: "
            f"{sorted(set(dependency_weights) ^ set(loyalties))}"
        )
    keys = sorted(dependency_weights)
    if any(dependency_weights[k] < 0 for k in keys):
        raise ValueError("dependency weights must be non-negative")
    total = math.fsum(dependency_weights[k] for k in keys)
    if total <= 0:
        raise ValueError("total dependency weight is zero")
    value = math.fsum(dependency_weights[k] * loyalties[k] for k in keys) / total
    lo = min(loyalties[k] for k in keys)
    hi = max(loyalties[k] for k in keys)
    # rounding can push a constant profile a hair outside its own range
    return min(hi, max(lo, value))


def effective_bargaining_power(base: float, cohesion: float) -> float:
    if base < 0:
        raise ValueError("base bargaining power must be >= 0")
    if not (0.0 <= cohesion <= 1.0):
        raise ValueError("cohesion must lie in [0, 1]")
    return base * cohesion


def loyalty_gap(target: float, observed: float) -> float:
    """Target minus observed loyalty; positive means the member falls short."""
    for v in (target, observed):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"loyalty {v} outside [0, 1]")
    return target - observed


def needs_intervention(gap: float, threshold: float = INTERVENTION_GAP) -> bool:
    return gap > threshold
