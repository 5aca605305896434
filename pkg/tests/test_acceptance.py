"""Acceptance criteria 1-8, each printed as one PASS/FAIL line in the summary."""

import itertools
import json
import math
import time

import mpmath
import numpy as np
import pytest
from scipy import stats as sps

from loyaltygame._search import golden_section_max
from loyaltygame.dynamics import classify_regime, DynamicsSettings, simulate_loyalty_evolution
from loyaltygame.equilibrium import analytic_symmetric_equilibrium, best_response, solve_tpe
from loyaltygame.harness import GridSpec, monte_carlo_robustness, run_sweep
from loyaltygame.model import (
    MechanismStrengths,
    TeamConfig,
    base_payoff,
    marginal_utility,
    team_output,
    teammates_payoff,
    utility,
    utility_expanded,
)
from loyaltygame.scenarios import load_builtin, run_case_study
from loyaltygame.stats import bootstrap_mean_ci, paired_t_test, pearson_r, t_cdf, t_ppf
from loyaltygame.translation import team_cohesion


def random_config(rng, sizes=(2, 3)):
    return TeamConfig(
        productivity=rng.uniform(5, 40),
        returns_exponent=rng.uniform(0.3, 0.8),
        effort_cost=rng.uniform(0.5, 4.0),
        team_size=int(rng.choice(sizes)),
        effort_cap=rng.uniform(1, 20),
    )


def random_mech(rng):
    return MechanismStrengths(rng.uniform(0, 1), rng.uniform(0, 0.9))


def deviation_utility(c, m, theta, a, i, own):
    """Member i's utility when switching to each effort in ``own`` (vectorized oracle)."""
    others = a.sum() - a[i]
    q = c.productivity * (own + others) ** c.returns_exponent
    n = c.team_size
    base = q / n - c.effort_cost * own
    mates = (n - 1) / n * q - c.effort_cost * others
    return base + theta * (m.loyalty_benefit * mates + m.cost_tolerance * c.effort_cost * own)


def test_criterion_1_oracle_equivalence(acceptance):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst_gain, worst_gap, failures = 0.0, 0.0, 0
    for _ in range(50):
        c, m = random_config(rng), random_mech(rng)
        theta = rng.uniform(0, 1, c.team_size)
        eq = solve_tpe(c, m, theta)
        a = eq.profile
        grid = np.linspace(0, c.effort_cap, 21)
        ok = eq.converged
        # every point of the joint grid, read as a unilateral deviation by each member
        points = np.array(list(itertools.product(grid, repeat=c.team_size)))
        for i in range(c.team_size):
            gains = deviation_utility(c, m, theta[i], a, i, points[:, i]) - eq.utilities[i]
            worst_gain = max(worst_gain, float(gains.max()))
            ok &= bool(np.all(gains <= 1e-9 * max(1.0, abs(eq.utilities[i]))))
        for i in range(c.team_size):
            def u(x, i=i):
                dev = a.copy()
                dev[i] = x
                return utility(c, m, theta[i], dev, i)

            gap = abs(golden_section_max(u, 0.0, c.effort_cap, tol=1e-10) - a[i])
            worst_gap = max(worst_gap, gap)
            ok &= gap <= 1e-4
        failures += not ok
    elapsed = time.perf_counter() - start
    passed = failures == 0 and elapsed < 10
    acceptance(1, passed, f"50 configs, failures={failures}, max grid gain={worst_gain:.2e}, "
                          f"max argmax gap={worst_gap:.2e}, {elapsed:.2f}s (limit 10s)")
    assert passed


def mp_argmax(c, m, theta, others):
    """Golden-section argmax of own utility in 50-digit arithmetic.

    In double precision a flat optimum can only be located to about
    sqrt(machine epsilon) relative to the utility scale, which is coarser
    than the 1e-6 criterion for some draws.
    """
    with mpmath.workdps(50):
        w, b, cost = mpmath.mpf(c.productivity), mpmath.mpf(c.returns_exponent), mpmath.mpf(c.effort_cost)
        n, th, o = c.team_size, mpmath.mpf(theta), mpmath.mpf(others)
        phi_b, phi_c = mpmath.mpf(m.loyalty_benefit), mpmath.mpf(m.cost_tolerance)

        def u(x):
            q = w * (x + o) ** b
            mates = (n - 1) * q / n - cost * o
            return q / n - cost * x + th * (phi_b * mates + phi_c * cost * x)

        return golden_section_max(u, mpmath.mpf(0), mpmath.mpf(c.effort_cap), tol=mpmath.mpf("1e-20"))


def test_criterion_2_closed_form_fidelity(acceptance):
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    worst_br = 0.0
    for _ in range(200):
        c, m = random_config(rng, sizes=range(2, 9)), random_mech(rng)
        theta = rng.uniform(0, 1)
        others = rng.uniform(0, c.effort_cap * (c.team_size - 1))
        numeric = mp_argmax(c, m, theta, others)
        worst_br = max(worst_br, abs(best_response(c, m, theta, others) - float(numeric)))
    worst_sym = 0.0
    for _ in range(100):
        c, m = random_config(rng, sizes=range(2, 9)), random_mech(rng)
        theta = rng.uniform(0, 1)
        eq = solve_tpe(c, m, theta)
        worst_sym = max(worst_sym, float(np.max(np.abs(eq.profile - analytic_symmetric_equilibrium(c, m, theta)))))
    elapsed = time.perf_counter() - start
    passed = worst_br <= 1e-6 and worst_sym <= 1e-5 and elapsed < 5
    acceptance(2, passed, f"max |BR - argmax|={worst_br:.2e} (tol 1e-6), "
                          f"max |symmetric - solver|={worst_sym:.2e} (tol 1e-5), {elapsed:.2f}s (limit 5s)")
    assert passed


def test_criterion_3_behavioral_targets(acceptance):
    start = time.perf_counter()
    report = run_sweep(GridSpec(), workers=1)
    elapsed = time.perf_counter() - start
    fr = report.targets.fractions
    rows = sum(1 for _ in report.rows())
    checks = {
        "loyalty_monotonicity": fr["loyalty_monotonicity"] == 1.0,
        "bounded_outcomes": fr["bounded_outcomes"] == 1.0,
        "free_riding_baseline": fr["free_riding_baseline"] >= 0.95,
        "effort_differentiation": fr["effort_differentiation"] >= 0.95,
        "mechanism_synergy": fr["mechanism_synergy"] >= 0.90,
        "team_size_effect": fr["team_size_effect"] == 1.0,
    }
    passed = all(checks.values()) and rows == 3125 and elapsed < 60
    stats = report.statistics
    detail = ", ".join(f"{k}={fr[k]:.4f}" for k in checks)
    acceptance(3, passed, f"{rows} rows; {detail}; median diff capped="
                          f"{stats['median_differentiation']:.2f} uncapped="
                          f"{stats['median_differentiation_uncapped']:.2f} (published 15.04); "
                          f"{elapsed:.1f}s (limit 60s)")
    assert passed


def test_criterion_4_monte_carlo(acceptance):
    start = time.perf_counter()
    a = monte_carlo_robustness(noise_fraction=0.15, trials=2000, seed=0)
    elapsed = time.perf_counter() - start
    b = monte_carlo_robustness(noise_fraction=0.15, trials=2000, seed=0)
    identical = json.dumps(a.as_dict()) == json.dumps(b.as_dict())
    passed = a.monotonic_fraction == 1.0 and identical and elapsed < 60
    acceptance(4, passed, f"2000 trials, monotonic fraction={a.monotonic_fraction:.4f}, "
                          f"bit-identical rerun={identical}, {elapsed:.1f}s (limit 60s)")
    assert passed


def test_criterion_5_apache(acceptance):
    start = time.perf_counter()
    r = run_case_study(load_builtin("apache"))
    elapsed = time.perf_counter() - start
    eff = [p.effort_uncapped for p in r.phases]
    decreasing = all(y < x for x, y in zip(eff, eff[1:]))
    ordering = sum(row["pattern_matching"] + row["trend_consistency"] for row in r.rubric["per_phase"])
    passed = decreasing and r.spearman_total == 1.0 and r.spearman_effort == 1.0 \
        and ordering == 32 and elapsed < 5
    acceptance(5, passed, f"efforts {[round(e, 2) for e in eff]}, spearman={r.spearman_total}, "
                          f"rubric {r.rubric['score']:g}/{r.rubric['max_score']:g}, {elapsed:.2f}s (limit 5s)")
    assert passed


def test_criterion_6_dynamics(acceptance):
    c, m = TeamConfig(), MechanismStrengths()
    start = time.perf_counter()
    up = simulate_loyalty_evolution(c, m, 0.6)
    down = simulate_loyalty_evolution(c, m, 0.1)
    still = simulate_loyalty_evolution(c, m, 0.35, DynamicsSettings(learning_rate=0.0))
    elapsed = time.perf_counter() - start
    const = all(np.array_equal(s.loyalties, still.states[0].loyalties) for s in still.states)
    passed = (
        classify_regime(up) == "virtuous"
        and classify_regime(down) == "vicious"
        and up.mean_loyalty()[-1] == 1.0
        and down.mean_loyalty()[-1] == 0.0
        and const
        and elapsed < 5
    )
    acceptance(6, passed, f"theta 0.6 -> {up.mean_loyalty()[-1]:.3f}, 0.1 -> {down.mean_loyalty()[-1]:.3f}, "
                          f"rate 0 constant={const}, {elapsed:.2f}s (limit 5s)")
    assert passed


# Two-sided critical values t_{q, df}.
T_TABLE = [
    (0.975, 1, 12.7062047362), (0.975, 2, 4.30265272975), (0.975, 5, 2.57058183661),
    (0.975, 10, 2.22813885196), (0.975, 30, 2.04227245630), (0.95, 1, 6.31375151468),
    (0.95, 2, 2.91998558036), (0.95, 5, 2.01504837333), (0.95, 10, 1.81246112281),
    (0.95, 30, 1.69726088659), (0.995, 1, 63.6567411629), (0.995, 5, 4.03214298356),
    (0.995, 10, 3.16927267261),
]


def test_criterion_7_statistics(acceptance):
    worst_cdf = max(abs(t_cdf(t, df) - q) for q, df, t in T_TABLE)
    worst_ppf = max(abs(t_ppf(q, df) - t) for q, df, t in T_TABLE)
    worst_oracle = max(abs(t_cdf(t, df) - sps.t.cdf(t, df)) for _, df, t in T_TABLE)
    t, _ = paired_t_test([1, 2, 3, 4, 5], [0] * 5)
    boot = bootstrap_mean_ci(np.arange(1, 101), seed=0)
    x = np.linspace(0, 10, 25)
    r_pos, _ = pearson_r(x, 3 * x + 2)
    r_neg, _ = pearson_r(x, -0.5 * x + 1)
    passed = (
        worst_cdf <= 1e-4
        and worst_ppf <= 1e-4
        and worst_oracle <= 1e-10
        and abs(t - 4.2426) < 1e-4
        and boot.ci_low < 50.5 < boot.ci_high
        and abs(r_pos - 1) < 1e-9
        and abs(r_neg + 1) < 1e-9
    )
    acceptance(7, passed, f"max cdf err={worst_cdf:.1e}, max ppf err={worst_ppf:.1e}, paired t={t:.4f}, "
                          f"bootstrap [{boot.ci_low:.2f}, {boot.ci_high:.2f}], r=+{r_pos:.12f}/{r_neg:.12f}")
    assert passed


def test_criterion_8_numerical_identities(acceptance):
    rng = np.random.default_rng(99)
    bad = {"expanded": 0, "conservation": 0, "cohesion": 0, "marginal": 0}
    for _ in range(1000):
        c, m = random_config(rng, sizes=range(2, 9)), random_mech(rng)
        theta = rng.uniform(0, 1)
        a = rng.uniform(0.05, 0.95, c.team_size) * c.effort_cap
        i = int(rng.integers(c.team_size))
        u1, u2 = utility(c, m, theta, a, i), utility_expanded(c, m, theta, a, i)
        bad["expanded"] += not math.isclose(u1, u2, rel_tol=1e-10, abs_tol=1e-9)
        total = base_payoff(c, a, i) + teammates_payoff(c, a, i)
        bad["conservation"] += not math.isclose(
            total, team_output(c, a) - c.effort_cost * a.sum(), rel_tol=1e-10, abs_tol=1e-9
        )
        w = {str(k): v for k, v in enumerate(rng.uniform(0.01, 1, c.team_size))}
        t = {str(k): v for k, v in enumerate(rng.uniform(0, 1, c.team_size))}
        k = rng.uniform(0.1, 100)
        bad["cohesion"] += not math.isclose(
            team_cohesion(w, t), team_cohesion({n: v * k for n, v in w.items()}, t), abs_tol=1e-12
        )
        h = 1e-6 * c.effort_cap
        up, dn = a.copy(), a.copy()
        up[i] += h
        dn[i] -= h
        fd = (utility(c, m, theta, up, i) - utility(c, m, theta, dn, i)) / (2 * h)
        bad["marginal"] += not math.isclose(fd, marginal_utility(c, m, theta, a, i), rel_tol=1e-5, abs_tol=1e-5)
    passed = not any(bad.values())
    acceptance(8, passed, "1000 draws, failures " + ", ".join(f"{k}={v}" for k, v in bad.items()))
    assert passed


@pytest.mark.parametrize("q,df,t", T_TABLE)
def test_reference_table_against_scipy(q, df, t):
    assert sps.t.ppf(q, df) == pytest.approx(t, abs=1e-9)
