"""Generalisation metrics, learners and bounds for stochastic minimax problems."""

__version__ = "0.1.0"

from .core import (Dataset, DecisionSet, Estimate, EvalSpec, MinimaxProblem, Point, derive_seed,
                   empirical_risk, finite_diff_check, neighboring_dataset, population_risk, project,
                   sample_dataset)
from .algorithms import AlgoConfig, Trajectory, run_gda, run_gdmax, run_ppa
from .problems import (make_bilinear, make_gdmax_failure, make_interchange_example, make_linear_gan,
                       make_problem, make_quadratic_saddle, make_truncated_gaussian)

__all__ = [
    "AlgoConfig", "Dataset", "DecisionSet", "Estimate", "EvalSpec", "MinimaxProblem", "Point",
    "Trajectory", "derive_seed", "empirical_risk", "finite_diff_check", "make_bilinear",
    "make_gdmax_failure", "make_interchange_example", "make_linear_gan", "make_problem",
    "make_quadratic_saddle", "make_truncated_gaussian", "neighboring_dataset", "population_risk",
    "project", "run_gda", "run_gdmax", "run_ppa", "sample_dataset",
]
