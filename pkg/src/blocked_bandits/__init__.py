"""Sparse linear bandits under a blocking constraint (each arm pulled at most once)."""

from .bandit import BlockingViolation, Environment, RunTrace, pull, regret_trace
from .corral import CorralPolicy, default_eta, omd_update, run_cbslb, sparsity_grid
from .design import (
    Design,
    MinEigenvalueDesign,
    RelaxationSolution,
    choose_u_hat,
    get_good_subset,
    randomized_round,
    solve_relaxation,
    subset_search,
)
from .harness import ConfigError, ExperimentConfig, preset_config, run_experiment
from .lasso import BlockedLasso, default_lambda, lasso_fit
from .model import (
    ArmSet,
    Instance,
    Parameter,
    gen_hard_instance,
    gen_sparse_instance,
    gen_sparse_theta,
    tail_ratio,
    top_t_value,
)
from .policies import BSLB, ESTCRejection, RandomPolicy, RidgeETC, explore_budget

__version__ = "0.1.0"

__all__ = [
    "ArmSet", "Parameter", "Instance", "tail_ratio", "top_t_value",
    "gen_sparse_theta", "gen_hard_instance", "gen_sparse_instance",
    "BlockedLasso", "default_lambda", "lasso_fit",
    "RelaxationSolution", "Design", "MinEigenvalueDesign", "solve_relaxation",
    "randomized_round", "subset_search", "get_good_subset", "choose_u_hat",
    "Environment", "RunTrace", "BlockingViolation", "pull", "regret_trace",
    "BSLB", "RidgeETC", "ESTCRejection", "RandomPolicy", "explore_budget",
    "CorralPolicy", "run_cbslb", "sparsity_grid", "default_eta", "omd_update",
    "ExperimentConfig", "ConfigError", "run_experiment", "preset_config",
]
