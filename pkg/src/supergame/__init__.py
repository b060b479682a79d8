"""Scenario-sampling simulated maximum likelihood for large supermodular games."""

from .dist import ShockFamily, TruncationSide
from .errors import (
    AllMassUnderflow,
    DegenerateTruncation,
    FeasibleSetTooLarge,
    NoActionRegion,
    NonConvergence,
    RecyclingUnavailable,
    SchemaError,
    Separation,
    SingularHessian,
    SupergameError,
    SupermodularityViolation,
    TooManyScenarios,
)
from .model import GameKind, GameModel, Theta
from .equil import best_response, is_ne, maximal_ne, minimal_ne
from .sampler import ImportanceDraw, Scenario, find_threshold, locate_scenario, log_lambda, log_zeta, sample_scenario, sample_scenarios
from .lik import CrnBlock, ScenarioTemplates, build_templates, grad_loglik, loglik_from_templates, simulate_likelihood, simulated_loglik
from .fit import FitOptions, FitResult, hessian_se, lr_test, naive_probit, sml_fit
from .exper import McDesign, random_geometric_graph, run_mc, simulate_game

__version__ = "0.1.0"

__all__ = [
    "AllMassUnderflow",
    "CrnBlock",
    "DegenerateTruncation",
    "FeasibleSetTooLarge",
    "FitOptions",
    "FitResult",
    "GameKind",
    "GameModel",
    "ImportanceDraw",
    "McDesign",
    "NoActionRegion",
    "NonConvergence",
    "RecyclingUnavailable",
    "Scenario",
    "ScenarioTemplates",
    "SchemaError",
    "Separation",
    "ShockFamily",
    "SingularHessian",
    "SupergameError",
    "SupermodularityViolation",
    "Theta",
    "TooManyScenarios",
    "TruncationSide",
    "best_response",
    "build_templates",
    "find_threshold",
    "grad_loglik",
    "hessian_se",
    "is_ne",
    "locate_scenario",
    "log_lambda",
    "log_zeta",
    "loglik_from_templates",
    "lr_test",
    "maximal_ne",
    "minimal_ne",
    "naive_probit",
    "random_geometric_graph",
    "run_mc",
    "sample_scenario",
    "sample_scenarios",
    "simulate_game",
    "simulate_likelihood",
    "simulated_loglik",
    "sml_fit",
]
