"""Slicing and the two inverse-regression estimators.

Both fits share the same skeleton: standardize the covariates, slice the
sample by response order statistics, average the standardized covariates per
slice, eigendecompose a second-moment summary of the slice means, and map the
leading eigenvectors back through the standardizer. They differ in which
matrices play those roles:

  sir    sample covariance whitening; slice-mean outer-product average
  esir   Kendall's tau whitening; Kendall's tau of the slice means

The tau-based variant keeps working when the covariates are heavy-tailed
elliptical (no second moments needed); the covariance-based one is the
textbook estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptical import Dataset
from .errors import KTooLarge, TooFewPoints
from .kendall import TauMatrix, kendall_tau
from .linalg import inv_sqrt_sym, sym_eig


@dataclass(frozen=True)
class SliceAssignment:
    """Partition of observations into response-ordered slices.

    ``order`` sorts the responses ascending (stable, so ties keep their
    original index order). ``boundaries`` holds h_count+1 cut points into the
    sorted order; slice h is ``order[boundaries[h]:boundaries[h+1]]``. The
    first h_count-1 slices have exactly floor(n/h) members and the last slice
    absorbs the remainder.
    """

    order: np.ndarray
    boundaries: np.ndarray
    h_count: int


def slice_by_response(y, h: int) -> SliceAssignment:
    """Equal-count slices of the responses, remainder in the last slice."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"y must be a vector, got shape {y.shape}")
    if h < 1:
        raise ValueError("h must be >= 1")
    n = y.shape[0]
    if n < 2 * h:
        raise TooFewPoints(f"need at least 2h={2 * h} observations, got {n}")
    order = np.argsort(y, kind="stable")
    size = n // h
    boundaries = np.array([i * size for i in range(h)] + [n], dtype=int)
    return SliceAssignment(order, boundaries, h)


def slice_means(x_std, a: SliceAssignment) -> np.ndarray:
    """Per-slice averages of the rows of ``x_std``; shape (h_count, p)."""
    x_std = np.asarray(x_std, dtype=float)
    if x_std.shape[0] != a.order.shape[0]:
        raise ValueError("x_std rows do not match the slice assignment")
    means = np.empty((a.h_count, x_std.shape[1]))
    for h in range(a.h_count):
        rows = a.order[a.boundaries[h] : a.boundaries[h + 1]]
        means[h] = x_std[rows].mean(axis=0)
    return means


def slice_kendall_tau(means) -> TauMatrix:
    """Kendall's tau matrix over the slice-mean vectors."""
    means = np.asarray(means, dtype=float)
    if means.shape[0] < 2:
        raise ValueError("need at least 2 slices")
    return kendall_tau(means, "skip")


@dataclass(frozen=True)
class SdrFit:
    """Estimated dimension-reduction directions.

    ``directions`` rows are the fitted directions in the original coordinates;
    ``standardized_directions`` rows are the corresponding orthonormal
    eigenvectors in whitened coordinates. ``eigenvalues`` are the top-k
    eigenvalues of the slice-mean summary matrix, sorted descending (in
    [0, 1] for the tau-based method).
    """

    method: str
    directions: np.ndarray
    standardized_directions: np.ndarray
    eigenvalues: np.ndarray
    h_used: int
    k: int


def _fit(x: np.ndarray, y: np.ndarray, h: int, k: int, method: str) -> SdrFit:
    n, p = x.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > min(p, h - 1):
        raise KTooLarge(f"k={k} exceeds min(p, h-1)={min(p, h - 1)}")
    if n < 2 * h:
        raise TooFewPoints(f"need at least 2h={2 * h} observations, got {n}")

    if method == "esir":
        scatter = kendall_tau(x).m
    else:
        scatter = np.atleast_2d(np.cov(x, rowvar=False))
    whitener = inv_sqrt_sym(scatter)
    x_std = (x - x.mean(axis=0)) @ whitener

    assignment = slice_by_response(y, h)
    means = slice_means(x_std, assignment)
    if method == "esir":
        summary = slice_kendall_tau(means).m
    else:
        summary = means.T @ means / h

    dec = sym_eig(summary)
    eta = dec.eigenvectors[:, :k].T
    beta = eta @ whitener
    eigenvalues = dec.eigenvalues[:k].copy()
    if method == "esir":
        # trace-1 PSD summary: clip round-off spill outside [0, 1]
        eigenvalues = np.clip(eigenvalues, 0.0, 1.0)
    return SdrFit(method, beta, eta, eigenvalues, h, k)


def esir_fit(d: Dataset, h: int, k: int) -> SdrFit:
    """Tau-based fit: robust to heavy-tailed elliptical covariates.

    Steps: estimate the sample Kendall's tau matrix, whiten by its inverse
    square root, slice by response, average per slice, take the Kendall's tau
    matrix of the slice means, and back-transform its top-k eigenvectors.
    """
    return _fit(d.x, d.y, h, k, "esir")


def sir_fit(d: Dataset, h: int, k: int) -> SdrFit:
    """Covariance-based fit (the classic estimator).

    Whitens by the sample covariance (denominator n-1), slices, and
    eigendecomposes the equal-weight average of slice-mean outer products
    (equal weights match the fixed slice-count design).
    """
    return _fit(d.x, d.y, h, k, "sir")


def slice_mean_tau(x, y, h: int, standardized: bool = False) -> np.ndarray:
    """Kendall's tau matrix of per-slice covariate means.

    With ``standardized=True`` the covariates are tau-whitened first, exactly
    as in :func:`esir_fit`; the default works on the raw covariates, which is
    the form whose large-sample limit the convergence experiment targets.
    """
    x = np.asarray(x, dtype=float)
    if standardized:
        whitener = inv_sqrt_sym(kendall_tau(x).m)
        x = (x - x.mean(axis=0)) @ whitener
    assignment = slice_by_response(y, h)
    return slice_kendall_tau(slice_means(x, assignment)).m
