"""Four-mechanism utility: internalization, warm glow, cost tolerance, guilt.

The guilt term penalizes shortfall below the effort cap quadratically.  With
warm glow and guilt switched off the utility reduces exactly to the
two-mechanism form with ``loyalty_benefit = internalization``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .equilibrium import SolverSettings
from .model import (
    MechanismStrengths,
    TeamConfig,
    _check_loyalty,
    as_loyalties,
    as_profile,
    team_output,
    teammates_payoff,
)

__all__ = [
    "ExtendedStrengths",
    "RECOMMENDED_RANGES",
    "guilt_penalty",
    "extended_utility",
    "extended_best_response",
    "solve_extended",
]

RECOMMENDED_RANGES = {
    "internalization": (0.4, 0.8),
    "warm_glow": (0.1, 0.4),
    "guilt": (0.05, 0.25),
}


@dataclass(frozen=True)
class ExtendedStrengths:
    internalization: float = 0.6
    warm_glow: float = 0.2
    cost_tolerance: float = 0.3
    guilt: float = 0.1

    def __post_init__(self) -> None:
        for name in ("internalization", "warm_glow", "cost_tolerance", "guilt"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be >= 0, got {v}")
        if self.cost_tolerance >= 1:
            raise ValueError("cost_tolerance must be < 1")

    def range_warnings(self) -> list[str]:
        """Parameters outside the recommended calibration ranges."""
        out = []
        for name, (lo, hi) in RECOMMENDED_RANGES.items():
            v = getattr(self, name)
            if not (lo <= v <= hi):
                out.append(f"{name}={v} outside recommended [{lo}, {hi}]")
        return out

    def warn_if_unusual(self) -> None:
        for msg in self.range_warnings():
            warnings.warn(msg, stacklevel=2)

    @classmethod
    def from_consolidated(cls, mech: MechanismStrengths) -> "ExtendedStrengths":
        return cls(mech.loyalty_benefit, 0.0, mech.cost_tolerance, 0.0)


def guilt_penalty(effort_cap: float, effort: float) -> float:
    """Squared shortfall below the cap (zero at or above it)."""
    return max(0.0, effort_cap - effort) ** 2


def extended_utility(
    config: TeamConfig,
    ext: ExtendedStrengths,
    loyalty: float,
    actions: Sequence[float],
    member: int,
) -> float:
    _check_loyalty(loyalty)
    a = as_profile(config, actions)
    if not (0 <= member < config.team_size):
        raise IndexError(f"member {member} out of range")
    own = a[member]
    c = config.effort_cost
    return (
        team_output(config, a) / config.team_size
        - c * (1.0 - ext.cost_tolerance * loyalty) * own
        + ext.internalization * loyalty * teammates_payoff(config, a, member)
        + ext.warm_glow * loyalty * own
        - ext.guilt * loyalty * guilt_penalty(config.effort_cap, own)
    )


def _own_effort_slope(config, ext, loyalty, others_total):
    """Derivative of own extended utility in own effort (decreasing: the objective is concave)."""
    n, w, b, c = config.team_size, config.productivity, config.returns_exponent, config.effort_cost
    share = (1.0 + ext.internalization * loyalty * (n - 1)) / n
    cost = c * (1.0 - ext.cost_tolerance * loyalty) - ext.warm_glow * loyalty
    cap = config.effort_cap

    def slope(x: float) -> float:
        total = x + others_total
        gain = math.inf if total <= 0.0 else share * w * b * total ** (b - 1.0)
        return gain - cost + 2.0 * ext.guilt * loyalty * max(0.0, cap - x)

    return slope


def extended_best_response(
    config: TeamConfig,
    ext: ExtendedStrengths,
    loyalty: float,
    others_total: float,
    *,
    tol: float = 1e-12,
) -> float:
    """Argmax of own extended utility on ``[0, effort_cap]``.

    The objective is concave, so the argmax is the zero of its decreasing
    slope (or a bound); it is found by bisection.
    """
    if others_total < 0:
        raise ValueError("others_total must be >= 0")
    _check_loyalty(loyalty)
    slope = _own_effort_slope(config, ext, loyalty, others_total)
    lo, hi = 0.0, config.effort_cap
    if slope(hi) >= 0.0:
        return hi
    if slope(lo) <= 0.0:
        return lo
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_extended(
    config: TeamConfig,
    ext: ExtendedStrengths,
    loyalties: Sequence[float] | float,
    settings: SolverSettings | None = None,
) -> tuple[np.ndarray, int, bool]:
    """Sequential best-response iteration with the numeric extended response.

    Returns ``(profile, sweeps, converged)``.
    """
    settings = settings or SolverSettings()
    theta = as_loyalties(config, loyalties)
    n = config.team_size
    if settings.initial_profile is None:
        a = np.full(n, config.effort_cap / 2.0)
    else:
        a = np.clip(np.asarray(settings.initial_profile, dtype=float), 0.0, config.effort_cap)
    for sweep in range(1, settings.max_iterations + 1):
        prev = a.copy()
        for i in range(n):
            a[i] = extended_best_response(config, ext, float(theta[i]), float(a.sum() - a[i]))
        if np.max(np.abs(a - prev)) < settings.tolerance:
            return a, sweep, True
    return a, settings.max_iterations, False
