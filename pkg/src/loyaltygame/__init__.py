"""Loyalty as a counterforce to free-riding in team production games."""

from .dynamics import DynamicsSettings, Trajectory, classify_regime, simulate_loyalty_evolution
from .equilibrium import (
    EquilibriumResult,
    SolverSettings,
    analytic_symmetric_equilibrium,
    best_response,
    social_optimum,
    solve_tpe,
    welfare_loss,
)
from .extended import ExtendedStrengths, extended_best_response, extended_utility, solve_extended
from .harness import (
    GridSpec,
    effort_differentiation,
    monte_carlo_robustness,
    run_sweep,
    synergy_analysis,
)
from .model import (
    MechanismStrengths,
    SingularPointError,
    TeamConfig,
    marginal_utility,
    team_output,
    utility,
)
from .scenarios import (
    Counterfactual,
    Scenario,
    ScenarioError,
    ScenarioInvariantError,
    ScenarioParseError,
    ScenarioSchemaError,
    load_builtin,
    load_scenario,
    run_case_study,
    run_counterfactual,
)
from .stats import bootstrap_mean_ci, cohens_d, paired_t_test, pearson_r, spearman_rho
from .translation import (
    AGENT_WEIGHTS,
    HUMAN_WEIGHTS,
    FactorWeights,
    MemberFactors,
    dependency_coefficients,
    loyalty_score,
    team_cohesion,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
