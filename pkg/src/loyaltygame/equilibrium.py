"""Best responses, the Team Production Equilibrium solver and analytic baselines.

Own utility depends on teammates only through their total effort, and the
first-order condition pins down the *team total* a member wants to see::

    target_i = (omega*beta*(1 + phi_B*theta_i*(n-1)) / (n*c*(1 - phi_C*theta_i)))**(1/(1-beta))

so the best response is ``clip(target_i - others_total, 0, cap)``.

When several members share the same loyalty they share the same target and
the equilibrium set is a continuum: any split of the target total is a
fixed point.  A literal member-by-member Gauss-Seidel sweep from the
midpoint then hands the whole total to the last member of the tie.  The
default ``"grouped"`` method runs the same sequential sweep over *tie
groups* (members with identical loyalty, ordered by first index) and splits
each group's joint best response equally, which is again a mutual best
response.  It coincides with the literal sweep when all loyalties differ and
selects the symmetric equilibrium when they are all equal.  The literal
sweep is available as ``"gauss-seidel"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .model import (
    MechanismStrengths,
    TeamConfig,
    as_loyalties,
    benefit_multiplier,
    cost_multiplier,
    utility,
)

__all__ = [
    "SolverSettings",
    "EquilibriumResult",
    "WelfareLoss",
    "target_total_effort",
    "best_response",
    "best_responses",
    "solve_tpe",
    "analytic_symmetric_equilibrium",
    "social_optimum",
    "symmetric_profile",
    "welfare_loss",
]

Method = Literal["grouped", "gauss-seidel"]


@dataclass(frozen=True)
class SolverSettings:
    """Convergence controls for :func:`solve_tpe`.

    ``initial_profile=None`` starts every member at half the effort cap.
    """

    tolerance: float = 1e-6
    max_iterations: int = 10_000
    initial_profile: tuple[float, ...] | None = None
    method: Method = "grouped"

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.method not in ("grouped", "gauss-seidel"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.initial_profile is not None:
            object.__setattr__(self, "initial_profile", tuple(float(x) for x in self.initial_profile))


@dataclass(frozen=True)
class EquilibriumResult:
    profile: np.ndarray
    utilities: np.ndarray
    iterations: int
    converged: bool
    residual: float
    loyalties: np.ndarray = field(repr=False)

    @property
    def total_effort(self) -> float:
        return float(self.profile.sum())

    def as_dict(self) -> dict:
        return {
            "profile": [float(x) for x in self.profile],
            "utilities": [float(x) for x in self.utilities],
            "loyalties": [float(x) for x in self.loyalties],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "residual": float(self.residual),
        }


def target_total_effort(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float | np.ndarray,
) -> float | np.ndarray:
    """Total team effort at which a member's marginal utility is zero."""
    theta = np.asarray(loyalty, dtype=float)
    w, b, c, n = (
        config.productivity,
        config.returns_exponent,
        config.effort_cost,
        config.team_size,
    )
    ratio = w * b * benefit_multiplier(config, mech, theta) / (n * c * cost_multiplier(mech, theta))
    out = ratio ** config.elasticity
    return float(out) if out.ndim == 0 else out


def best_response(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float,
    others_total: float,
) -> float:
    """Closed-form argmax of own utility on ``[0, effort_cap]``."""
    if others_total < 0:
        raise ValueError("others_total must be >= 0")
    if not (0.0 <= loyalty <= 1.0):
        raise ValueError(f"loyalty must lie in [0, 1], got {loyalty}")
    raw = target_total_effort(config, mech, loyalty) - others_total
    return min(max(raw, 0.0), config.effort_cap)


def best_responses(
    config: TeamConfig, mech: MechanismStrengths, loyalties: np.ndarray, profile: np.ndarray
) -> np.ndarray:
    """Vector of best responses of every member against ``profile``."""
    targets = target_total_effort(config, mech, loyalties)
    others = profile.sum() - profile
    return np.clip(targets - others, 0.0, config.effort_cap)


def _utilities(config, mech, theta, profile) -> np.ndarray:
    return np.array(
        [utility(config, mech, float(theta[i]), profile, i) for i in range(config.team_size)]
    )


def _tie_groups(theta: np.ndarray) -> list[np.ndarray]:
    groups: dict[float, list[int]] = {}
    for i, t in enumerate(theta):
        groups.setdefault(float(t), []).append(i)
    return [np.array(idx) for idx in groups.values()]


def solve_tpe(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalties: Sequence[float] | float,
    settings: SolverSettings | None = None,
) -> EquilibriumResult:
    """Iterate sequential best responses to a Team Production Equilibrium.

    A sweep updates every member (or tie group) once, in index order, each
    seeing the efforts already updated in the same sweep.  Iteration stops
    when two successive profiles differ by less than ``tolerance`` in the
    infinity norm and no member's best response is ``tolerance`` or more
    away from its effort.  Running out of iterations is reported through
    ``converged=False``, never raised.
    """
    settings = settings or SolverSettings()
    theta = as_loyalties(config, loyalties)
    n, cap = config.team_size, config.effort_cap
    targets = target_total_effort(config, mech, theta)

    if settings.initial_profile is None:
        a = np.full(n, cap / 2.0)
    else:
        a = np.clip(np.asarray(settings.initial_profile, dtype=float), 0.0, cap)
        if a.shape != (n,):
            raise ValueError(f"initial profile must have length {n}")

    if settings.method == "grouped":
        blocks = _tie_groups(theta)
    else:
        blocks = [np.array([i]) for i in range(n)]

    tol = settings.tolerance
    iterations = 0
    converged = False
    residual = float("inf")
    while iterations < settings.max_iterations:
        prev = a.copy()
        total = float(a.sum())
        for idx in blocks:
            outside = total - float(a[idx].sum())
            size = len(idx)
            joint = min(max(targets[idx[0]] - outside, 0.0), size * cap)
            # size * cap / size can round one ulp above the cap
            a[idx] = min(joint / size, cap)
            total = outside + float(a[idx].sum())
        iterations += 1
        residual = float(np.max(np.abs(np.clip(targets - (a.sum() - a), 0.0, cap) - a)))
        if np.max(np.abs(a - prev)) < tol and residual < tol:
            converged = True
            break

    return EquilibriumResult(
        profile=a,
        utilities=_utilities(config, mech, theta, a),
        iterations=iterations,
        converged=converged,
        residual=residual,
        loyalties=theta,
    )


def analytic_symmetric_equilibrium(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalty: float,
    *,
    clamp: bool = True,
    variant: Literal["foc", "printed"] = "foc",
) -> float:
    """Per-member effort in the symmetric equilibrium with common loyalty.

    The first-order condition fixes the team total, so the symmetric level
    is that total divided by ``n``.  ``variant="printed"`` drops the ``1/n``
    (the closed form as usually quoted for the free-riding baseline) and is
    only meant for side-by-side comparison.
    """
    if not (0.0 <= loyalty <= 1.0):
        raise ValueError(f"loyalty must lie in [0, 1], got {loyalty}")
    if variant not in ("foc", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    total = target_total_effort(config, mech, loyalty)
    level = total / config.team_size if variant == "foc" else total
    return min(max(level, 0.0), config.effort_cap) if clamp else level


def social_optimum(config: TeamConfig, *, clamp: bool = True) -> float:
    """Symmetric per-member effort maximizing ``Q - c * sum(a)``."""
    total = (config.productivity * config.returns_exponent / config.effort_cost) ** config.elasticity
    level = total / config.team_size
    return min(max(level, 0.0), config.effort_cap) if clamp else level


def symmetric_profile(config: TeamConfig, level: float) -> np.ndarray:
    return np.full(config.team_size, float(level))


@dataclass(frozen=True)
class WelfareLoss:
    loss: float
    social_welfare: float
    equilibrium_welfare: float
    fraction: float | None

    @property
    def fraction_defined(self) -> bool:
        return self.fraction is not None


def welfare_loss(
    config: TeamConfig,
    mech: MechanismStrengths,
    loyalties: Sequence[float] | float,
    settings: SolverSettings | None = None,
) -> WelfareLoss:
    """Total loyalty-augmented utility lost by playing the equilibrium.

    ``fraction`` is the loss relative to utility at the social optimum; it is
    ``None`` when that utility is not positive.
    """
    theta = as_loyalties(config, loyalties)
    social = symmetric_profile(config, social_optimum(config))
    eq = solve_tpe(config, mech, theta, settings)
    w_social = float(_utilities(config, mech, theta, social).sum())
    w_eq = float(eq.utilities.sum())
    loss = w_social - w_eq
    return WelfareLoss(
        loss=loss,
        social_welfare=w_social,
        equilibrium_welfare=w_eq,
        fraction=loss / w_social if w_social > 0 else None,
    )
