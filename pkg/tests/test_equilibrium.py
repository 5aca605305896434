import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loyaltygame._search import golden_section_max
from loyaltygame.equilibrium import (
    SolverSettings,
    analytic_symmetric_equilibrium,
    best_response,
    best_responses,
    social_optimum,
    solve_tpe,
    target_total_effort,
    welfare_loss,
)
from loyaltygame.model import MechanismStrengths, TeamConfig, utility

from .conftest import loyalty_values, mechanisms, team_configs

C, M = TeamConfig(), MechanismStrengths()


def test_free_riding_baseline_value():
    # (w*b / (n*c))^(1/(1-b)) / n = (20*0.5/12.5)^2 / 5
    expected = (20 * 0.5 / (5 * 2.5)) ** 2 / 5
    assert analytic_symmetric_equilibrium(C, M, 0.0) == pytest.approx(expected)
    eq = solve_tpe(C, M, 0.0)
    assert eq.converged
    assert np.allclose(eq.profile, expected, atol=1e-9)


def test_printed_variant_omits_share():
    foc = analytic_symmetric_equilibrium(C, M, 0.0, clamp=False)
    printed = analytic_symmetric_equilibrium(C, M, 0.0, clamp=False, variant="printed")
    assert printed == pytest.approx(foc * C.team_size)
    with pytest.raises(ValueError):
        analytic_symmetric_equilibrium(C, M, 0.0, variant="other")


def test_clamping():
    c = TeamConfig(productivity=30, returns_exponent=0.65, effort_cost=1.2, team_size=8)
    hi = analytic_symmetric_equilibrium(c, M, 0.9, clamp=False)
    assert hi > c.effort_cap
    assert analytic_symmetric_equilibrium(c, M, 0.9) == c.effort_cap
    assert np.all(solve_tpe(c, M, 0.9).profile == c.effort_cap)


def test_social_optimum_exceeds_baseline():
    assert social_optimum(C) > analytic_symmetric_equilibrium(C, M, 0.0)
    assert social_optimum(C, clamp=False) == pytest.approx((20 * 0.5 / 2.5) ** 2 / 5)


def test_best_response_clipped():
    assert best_response(C, M, 0.0, 1e6) == 0.0
    assert best_response(C, M, 1.0, 0.0) == C.effort_cap
    t = target_total_effort(C, M, 0.3)
    assert best_response(C, M, 0.3, t / 2) == pytest.approx(t / 2)


@given(team_configs(), mechanisms, loyalty_values, st.floats(0.0, 1.0))
def test_best_response_is_argmax(c, m, theta, frac):
    others = frac * c.effort_cap * (c.team_size - 1)
    a = np.full(c.team_size, others / (c.team_size - 1))

    def u(x):
        b = a.copy()
        b[0] = x
        return utility(c, m, theta, b, 0)

    br = best_response(c, m, theta, others)
    assert u(br) >= u(golden_section_max(u, 0.0, c.effort_cap)) - 1e-9


def test_converges_from_any_start():
    theta = [0.1, 0.4, 0.4, 0.7, 0.9]
    ref = solve_tpe(C, M, theta)
    for start in ([0] * 5, [10] * 5, [0, 10, 0, 10, 0]):
        eq = solve_tpe(C, M, theta, SolverSettings(initial_profile=start))
        assert eq.converged
        assert np.allclose(eq.profile, ref.profile, atol=1e-6)


def test_gauss_seidel_method_agrees():
    theta = [0.0, 0.2, 0.5, 0.6, 0.9]
    a = solve_tpe(C, M, theta).profile
    b = solve_tpe(C, M, theta, SolverSettings(method="gauss-seidel")).profile
    assert np.allclose(a, b, atol=1e-5)


def test_nonconvergence_is_reported():
    eq = solve_tpe(C, M, [0.1, 0.1, 0.5, 0.5, 0.9], SolverSettings(max_iterations=1, method="gauss-seidel"))
    assert isinstance(eq.converged, bool)
    assert eq.iterations <= 1


def test_equilibrium_is_fixed_point():
    theta = np.array([0.05, 0.3, 0.3, 0.6, 0.8])
    eq = solve_tpe(C, M, theta)
    assert np.allclose(best_responses(C, M, theta, eq.profile), eq.profile, atol=1e-6)


def test_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(tolerance=0)
    with pytest.raises(ValueError):
        SolverSettings(max_iterations=0)


@given(team_configs(), mechanisms, loyalty_values)
def test_symmetric_solver_matches_closed_form(c, m, theta):
    eq = solve_tpe(c, m, theta)
    assert eq.converged
    assert np.allclose(eq.profile, analytic_symmetric_equilibrium(c, m, theta), atol=1e-5)


@given(team_configs(), mechanisms, st.floats(0.0, 0.98), st.floats(0.001, 0.02))
def test_effort_weakly_increasing_in_loyalty(c, m, theta, step):
    lo = analytic_symmetric_equilibrium(c, m, theta)
    hi = analytic_symmetric_equilibrium(c, m, min(1.0, theta + step))
    assert hi >= lo


def test_welfare_loss_positive_without_loyalty():
    w = welfare_loss(C, M, 0.0)
    assert w.loss > 0
    assert 0 < w.fraction < 1


def test_result_serializes():
    d = solve_tpe(C, M, 0.5).as_dict()
    assert set(d) == {"profile", "utilities", "loyalties", "iterations", "converged", "residual"}
