"""Numerical workbench for intrinsic metrics of non-CMC biconservative surfaces."""

from .config import RunConfig, parse_config
from .conformal import (inverse_ricci_transform, laplace_beltrami, power_metric_curvature,
                        ricci_condition, ricci_transform)
from .embedding import (biconservativity_check, build_shape_operator, codazzi_check,
                        embedding_report, mean_curvature_from_k)
from .errors import (BiconserveError, ConfigError, ConvergenceError, DomainError,
                     GridTooSmallError, InfeasibleError, MismatchError)
from .flattener import ExponentProfile, feasibility_check, solve_exponent, verify_flat
from .grid import MetricGrid, ScalarField
from .kernels import BACKEND
from .metric import (brioschi_fd, build_metric, christoffels_closed_form, christoffels_fd,
                     gauss_curvature_fd, make_grid, to_isothermal, to_orthogonal)
from .pipeline import run_pipeline, write_outputs
from .profile import CurvatureProfile, integrate_profile, ode_rhs, pde_residual
from .report import Report

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BiconserveError",
    "ConfigError",
    "ConvergenceError",
    "CurvatureProfile",
    "DomainError",
    "ExponentProfile",
    "GridTooSmallError",
    "InfeasibleError",
    "MetricGrid",
    "MismatchError",
    "Report",
    "RunConfig",
    "ScalarField",
    "biconservativity_check",
    "brioschi_fd",
    "build_metric",
    "build_shape_operator",
    "christoffels_closed_form",
    "christoffels_fd",
    "codazzi_check",
    "embedding_report",
    "feasibility_check",
    "gauss_curvature_fd",
    "integrate_profile",
    "inverse_ricci_transform",
    "laplace_beltrami",
    "make_grid",
    "mean_curvature_from_k",
    "ode_rhs",
    "parse_config",
    "pde_residual",
    "power_metric_curvature",
    "ricci_condition",
    "ricci_transform",
    "run_pipeline",
    "solve_exponent",
    "to_isothermal",
    "to_orthogonal",
    "verify_flat",
    "write_outputs",
]
