"""Active-subspace diagnostics for black-box optimization problems."""
from .asm import (
    ActiveSubspace,
    activity_scores,
    build_c_matrix,
    discover,
    eigendecompose_symmetric,
    estimate_gradient_fd,
    explained_variance,
    partition,
    project,
)
from .design import DesignSpace, SampleSet, denormalize, lhs_sample, normalize, uniform_sample
from .diagnosis import DiagnosisReport, diagnose
from .ego import EgoConfig, EgoResult, ego_run, expected_improvement, maximize_ei
from .functions import TestFunction, analytic_gradient, fourbar, get_function, hartman6, zakharov
from .kriging import KrigingModel, concentrated_log_likelihood, kriging_fit
from .pce import PceModel, candidate_basis, lars_select, legendre_eval, pce_fit

__version__ = "0.1.0"

__all__ = [
    "ActiveSubspace",
    "DesignSpace",
    "DiagnosisReport",
    "EgoConfig",
    "EgoResult",
    "KrigingModel",
    "PceModel",
    "SampleSet",
    "TestFunction",
    "activity_scores",
    "analytic_gradient",
    "build_c_matrix",
    "candidate_basis",
    "concentrated_log_likelihood",
    "denormalize",
    "diagnose",
    "discover",
    "ego_run",
    "eigendecompose_symmetric",
    "estimate_gradient_fd",
    "expected_improvement",
    "explained_variance",
    "fourbar",
    "get_function",
    "hartman6",
    "kriging_fit",
    "lars_select",
    "legendre_eval",
    "lhs_sample",
    "maximize_ei",
    "normalize",
    "partition",
    "pce_fit",
    "project",
    "uniform_sample",
    "zakharov",
]
