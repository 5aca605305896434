"""Loyalty evolving with team output.

Each period the team plays its equilibrium at the current loyalties, and
every member then moves loyalty by ``learning_rate * (Q - output_target)``,
clipped to [0, 1].  All members read the same period output, so the update
is synchronous and order independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .equilibrium import SolverSettings, solve_tpe
from .model import MechanismStrengths, TeamConfig, as_loyalties, team_output

__all__ = [
    "DynamicsSettings",
    "PeriodState",
    "Trajectory",
    "default_output_target",
    "simulate_loyalty_evolution",
    "classify_regime",
]

Regime = Literal["virtuous", "vicious", "stationary"]


@dataclass(frozen=True)
class DynamicsSettings:
    """``output_target=None`` selects :func:`default_output_target`."""

    periods: int = 50
    learning_rate: float = 0.02
    output_target: float | None = None

    def __post_init__(self) -> None:
        if self.periods < 1:
            raise ValueError("periods must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")


@dataclass(frozen=True)
class PeriodState:
    period: int
    loyalties: np.ndarray
    profile: np.ndarray
    output: float
    converged: bool


@dataclass(frozen=True)
class Trajectory:
    states: tuple[PeriodState, ...]
    output_target: float

    def __len__(self) -> int:
        return len(self.states)

    def mean_loyalty(self) -> np.ndarray:
        return np.array([s.loyalties.mean() for s in self.states])

    def outputs(self) -> np.ndarray:
        return np.array([s.output for s in self.states])

    @property
    def all_converged(self) -> bool:
        return all(s.converged for s in self.states)

    def rows(self) -> list[dict]:
        """Long format: one row per (period, member)."""
        out = []
        for s in self.states:
            for i, (theta, effort) in enumerate(zip(s.loyalties, s.profile)):
                out.append(
                    {
                        "period": s.period,
                        "member": i,
                        "loyalty": float(theta),
                        "effort": float(effort),
                        "output": float(s.output),
                    }
                )
        return out


def default_output_target(
    config: TeamConfig,
    mech: MechanismStrengths,
    solver: SolverSettings | None = None,
    low: float = 0.0,
    high: float = 0.9,
) -> float:
    """Midpoint of equilibrium outputs at uniform loyalty ``low`` and ``high``."""
    q_low = team_output(config, solve_tpe(config, mech, low, solver).profile)
    q_high = team_output(config, solve_tpe(config, mech, high, solver).profile)
    return 0.5 * (q_low + q_high)


def simulate_loyalty_evolution(
    config: TeamConfig,
    mech: MechanismStrengths,
    initial: Sequence[float] | float,
    settings: DynamicsSettings | None = None,
    solver: SolverSettings | None = None,
) -> Trajectory:
    settings = settings or DynamicsSettings()
    theta = as_loyalties(config, initial).copy()
    target = settings.output_target
    if target is None:
        target = default_output_target(config, mech, solver)

    states = []
    for t in range(settings.periods + 1):
        eq = solve_tpe(config, mech, theta, solver)
        q = team_output(config, eq.profile)
        states.append(PeriodState(t, theta.copy(), eq.profile.copy(), q, eq.converged))
        if t == settings.periods:
            break
        theta = np.clip(theta + settings.learning_rate * (q - target), 0.0, 1.0)
    return Trajectory(tuple(states), float(target))


def classify_regime(trajectory: Trajectory, threshold: float = 0.05) -> Regime:
    """Compare mean loyalty over the final quarter with the initial mean."""
    if len(trajectory) < 2:
        raise ValueError("trajectory needs at least two periods")
    means = trajectory.mean_loyalty()
    tail = means[-max(1, math.ceil(len(means) / 4)):]
    shift = float(tail.mean() - means[0])
    if shift > threshold:
        return "virtuous"
    if shift < -threshold:
        return "vicious"
    return "stationary"
