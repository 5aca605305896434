"""Team production primitives: output, payoffs, the loyalty modifier and utility.

Every function here is pure. Effort profiles are any 1-d sequence of floats of
length ``config.team_size``; they are converted with :func:`as_profile`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "TeamConfig",
    "MechanismStrengths",
    "SingularPointError",
    "as_profile",
    "as_loyalties",
    "team_output",
    "base_payoff",
    "teammates_payoff",
    "loyalty_modifier",
    "utility",
    "utility_expanded",
    "marginal_utility",
    "benefit_multiplier",
    "cost_multiplier",
]


class SingularPointError(ValueError):
    """Raised when a derivative is requested where total effort is zero."""


@dataclass(frozen=True)
class TeamConfig:
    """Production environment shared by all members of one team.

    Attributes:
        productivity: output scale (omega), > 0
        returns_exponent: diminishing-returns exponent (beta), in (0, 1)
        effort_cost: marginal cost of one unit of own effort (c), > 0
        team_size: number of members (n), >= 2
        effort_cap: maximum effort per member, > 0
    """

    productivity: float = 20.0
    returns_exponent: float = 0.5
    effort_cost: float = 2.5
    team_size: int = 5
    effort_cap: float = 10.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.productivity) and self.productivity > 0):
            raise ValueError(f"productivity must be > 0, got {self.productivity}")
        if not (0.0 < self.returns_exponent < 1.0):
            raise ValueError(f"returns_exponent must be in (0, 1), got {self.returns_exponent}")
        if not (np.isfinite(self.effort_cost) and self.effort_cost > 0):
            raise ValueError(f"effort_cost must be > 0, got {self.effort_cost}")
        if int(self.team_size) != self.team_size or self.team_size < 2:
            raise ValueError(f"team_size must be an integer >= 2, got {self.team_size}")
        if not (np.isfinite(self.effort_cap) and self.effort_cap > 0):
            raise ValueError(f"effort_cap must be finite and > 0, got {self.effort_cap}")
        object.__setattr__(self, "team_size", int(self.team_size))

    @property
    def elasticity(self) -> float:
        """Effort elasticity 1 / (1 - beta)."""
        return 1.0 / (1.0 - self.returns_exponent)

    def replace(self, **changes) -> "TeamConfig":
        fields = dict(
            productivity=self.productivity,
            returns_exponent=self.returns_exponent,
            effort_cost=self.effort_cost,
            team_size=self.team_size,
            effort_cap=self.effort_cap,
        )
        fields.update(changes)
        return TeamConfig(**fields)


@dataclass(frozen=True)
class MechanismStrengths:
    """Loyalty benefit (welfare internalization) and cost-tolerance strengths."""

    loyalty_benefit: float = 0.8
    cost_tolerance: float = 0.3

    def __post_init__(self) -> None:
        if not (np.isfinite(self.loyalty_benefit) and self.loyalty_benefit >= 0):
            raise ValueError(f"loyalty_benefit must be >= 0, got {self.loyalty_benefit}")
        if not (0.0 <= self.cost_tolerance < 1.0):
            raise ValueError(f"cost_tolerance must be in [0, 1), got {self.cost_tolerance}")

    def scaled(self, factor: float) -> "MechanismStrengths":
        return MechanismStrengths(self.loyalty_benefit * factor, self.cost_tolerance * factor)


def as_profile(config: TeamConfig, actions: Sequence[float]) -> np.ndarray:
    """Validate an effort profile against ``config`` and return it as a float array."""
    a = np.asarray(actions, dtype=float)
    if a.ndim != 1 or a.shape[0] != config.team_size:
        raise ValueError(
            f"effort profile has shape {a.shape}, expected ({config.team_size},)"
        )
    if np.isnan(a).any():
        raise ValueError("effort profile contains NaN")
    if (a < 0).any() or (a > config.effort_cap).any():
        raise ValueError(f"efforts must lie in [0, {config.effort_cap}]")
    return a


def as_loyalties(config: TeamConfig, values: Sequence[float] | float) -> np.ndarray:
    """Broadcast a scalar or validate a per-member loyalty profile."""
    theta = np.asarray(values, dtype=float)
    if theta.ndim == 0:
        theta = np.full(config.team_size, float(theta))
    if theta.ndim != 1 or theta.shape[0] != config.team_size:
        raise ValueError(
            f"loyalty profile has shape {theta.shape}, expected ({config.team_size},)"
        )
    _check_loyalty(theta)
    return theta


def _check_loyalty(theta) -> None:
    t = np.asarray(theta, dtype=float)
    if np.isnan(t).any() or (t < 0).any() or (t > 1).any():
        raise ValueError(f"loyalty must lie in [0, 1], got {theta}")


def _check_member(config: TeamConfig, member: int) -> None:
    if not (0 <= member < config.team_size):
        raise IndexError(f"member {member} out of range for team of {config.team_size}")


def team_output(config: TeamConfig, actions: Sequence[float]) -> float:
    a = as_profile(config, actions)
    return config.productivity * float(a.sum()) ** config.returns_exponent


def base_payoff(config: TeamConfig, actions: Sequence[float], member: int) -> float:
    """Equal output share minus own effort cost."""
    _check_member(config, member)
    a = as_profile(config, actions)
    return team_output(config, a) / config.team_size - config.effort_cost * a[member]


def teammates_payoff(config: TeamConfig, actions: Sequence[float], member: int) -> float:
    """Aggregate material payoff of everyone except ``member``."""
    _check_member(config, member)
    a = as_profile(config, actions)
    n = config.team_size
    others = float(a.sum() - a[member])
    return (n - 1) / n * team_output(config, a) - config.effort_cost * others


def loyalty_modifier(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float,
    actions: Sequence[float],
    member: int,
) -> float:
    _check_loyalty(loyalty)
    a = as_profile(config, actions)
    return loyalty * (
        mech.loyalty_benefit * teammates_payoff(config, a, member)
        + mech.cost_tolerance * config.effort_cost * a[member]
    )


def utility(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float,
    actions: Sequence[float],
    member: int,
) -> float:
    """Loyalty-augmented utility: base payoff plus the loyalty modifier."""
    return base_payoff(config, actions, member) + loyalty_modifier(
        config, mech, loyalty, actions, member
    )


def utility_expanded(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float,
    actions: Sequence[float],
    member: int,
) -> float:
    """Same quantity as :func:`utility`, written with the discounted effort cost."""
    _check_loyalty(loyalty)
    a = as_profile(config, actions)
    q = team_output(config, a)
    c = config.effort_cost
    return (
        q / config.team_size
        - c * (1.0 - mech.cost_tolerance * loyalty) * a[member]
        + mech.loyalty_benefit * loyalty * teammates_payoff(config, a, member)
    )


def benefit_multiplier(config: TeamConfig, mech: MechanismStrengths, loyalty: float) -> float:
    """Factor ``1 + phi_B * theta * (n - 1)`` applied to the marginal output share."""
    return 1.0 + mech.loyalty_benefit * loyalty * (config.team_size - 1)


def cost_multiplier(mech: MechanismStrengths, loyalty: float) -> float:
    """Factor ``1 - phi_C * theta`` applied to the marginal effort cost."""
    return 1.0 - mech.cost_tolerance * loyalty


def marginal_utility(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float,
    actions: Sequence[float],
    member: int,
) -> float:
    """Derivative of :func:`utility` with respect to the member's own effort."""
    _check_member(config, member)
    _check_loyalty(loyalty)
    a = as_profile(config, actions)
    total = float(a.sum())
    if total <= 0.0:
        raise SingularPointError("marginal utility is unbounded at zero total effort")
    w, b, n = config.productivity, config.returns_exponent, config.team_size
    return (w * b / n) * total ** (b - 1.0) * benefit_multiplier(
        config, mech, loyalty
    ) - config.effort_cost * cost_multiplier(mech, loyalty)
