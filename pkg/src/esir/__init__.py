"""Sufficient dimension reduction for elliptical, possibly heavy-tailed data.

The package pairs the classic sliced-inverse-regression estimator with a
robust variant that swaps the covariance matrix for the multivariate
Kendall's tau matrix in both the whitening and the slice-mean summary steps.
It also ships the elliptical samplers, evaluation metrics, and Monte Carlo
harness used to benchmark the two estimators, plus a CSV-driven CLI.
"""

from .elliptical import (
    Dataset,
    EllipticalSpec,
    GeneratorKind,
    cauchy,
    f_ratio,
    generator_from_name,
    laplace,
    logistic,
    normal,
    sample_elliptical,
    sample_generating_variable,
    sample_unit_sphere,
    student_t,
)
from .errors import EsirError
from .kendall import TauMatrix, kendall_tau, population_tau_eigenvalues_mc, tau_vs_covariance_alignment
from .linalg import (
    EigenDecomp,
    cholesky,
    inv_sqrt_sym,
    projection_distance,
    spectral_norm,
    sym_eig,
)
from .metrics import OlsReport, TruthSpec, avg_r_squared, ks_normality, ols_fit, r_squared
from .sdr import (
    SdrFit,
    SliceAssignment,
    esir_fit,
    sir_fit,
    slice_by_response,
    slice_kendall_tau,
    slice_mean_tau,
    slice_means,
)
from .sim import (
    ConvergencePoint,
    ModelSpec,
    ReplicateSummary,
    convergence_experiment,
    emit_table,
    gen_dataset,
    model_spec,
    run_cell,
    truth_spec,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergencePoint",
    "Dataset",
    "EigenDecomp",
    "EllipticalSpec",
    "EsirError",
    "GeneratorKind",
    "ModelSpec",
    "OlsReport",
    "ReplicateSummary",
    "SdrFit",
    "SliceAssignment",
    "TauMatrix",
    "TruthSpec",
    "avg_r_squared",
    "cauchy",
    "cholesky",
    "convergence_experiment",
    "emit_table",
    "esir_fit",
    "f_ratio",
    "gen_dataset",
    "generator_from_name",
    "inv_sqrt_sym",
    "kendall_tau",
    "ks_normality",
    "laplace",
    "logistic",
    "model_spec",
    "normal",
    "ols_fit",
    "population_tau_eigenvalues_mc",
    "projection_distance",
    "r_squared",
    "run_cell",
    "sample_elliptical",
    "sample_generating_variable",
    "sample_unit_sphere",
    "sir_fit",
    "slice_by_response",
    "slice_kendall_tau",
    "slice_mean_tau",
    "slice_means",
    "spectral_norm",
    "student_t",
    "sym_eig",
    "tau_vs_covariance_alignment",
    "truth_spec",
]
