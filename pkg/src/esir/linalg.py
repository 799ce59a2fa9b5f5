"""Dense symmetric linear algebra primitives.

All operations take plain float ndarrays, validate symmetry up to a small
relative tolerance, and are pure functions of their inputs (no global state,
safe to call concurrently). The eigensolver is a cyclic Jacobi iteration:
simple, deterministic across runs and platforms, and accurate at the matrix
sizes this package targets (a few hundred rows at most).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NearSingular,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
    RankDeficient,
)

SYMMETRY_RTOL = 1e-12
MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-12  # relative to the Frobenius norm of the input
CHOLESKY_PIVOT_TOL = 1e-12
INV_SQRT_REL_FLOOR = 1e-10
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class EigenDecomp:
    """Spectral decomposition of a symmetric matrix.

    ``eigenvalues`` is sorted descending and column ``j`` of ``eigenvectors``
    pairs with ``eigenvalues[j]``. Each eigenvector is sign-fixed so that its
    largest-magnitude entry is positive (lowest index wins on ties); this
    makes downstream fits reproducible run to run.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def check_symmetric(a) -> np.ndarray:
    """Validate that ``a`` is square and symmetric within tolerance.

    The check is entrywise relative: ``|a[i,j] - a[j,i]|`` must not exceed
    ``1e-12 * max(1, |a[i,j]|)``. Returns the symmetrized ``(a + a.T) / 2``
    as float64.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    gap = np.abs(a - a.T)
    tol = SYMMETRY_RTOL * np.maximum(1.0, np.abs(a))
    if np.any(gap > tol):
        i, j = np.unravel_index(int(np.argmax(gap - tol)), a.shape)
        raise NotSymmetric(
            f"entries ({i},{j}) and ({j},{i}) differ by {gap[i, j]:.3e}"
        )
    return (a + a.T) / 2.0


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.sqrt(2.0) * np.linalg.norm(np.tril(a, -1)))


def _rotate(work: np.ndarray, vecs: np.ndarray, k: int, l: int) -> None:
    """Apply one Jacobi rotation zeroing ``work[k, l]`` in place."""
    akl = work[k, l]
    if akl == 0.0:
        return
    tau = (work[l, l] - work[k, k]) / (2.0 * akl)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    rot = np.array([[c, s], [-s, c]])
    idx = [k, l]
    work[:, idx] = work[:, idx] @ rot
    work[idx, :] = rot.T @ work[idx, :]
    work[k, l] = work[l, k] = 0.0
    vecs[:, idx] = vecs[:, idx] @ rot


def sym_eig(a, _max_sweeps: int = MAX_SWEEPS) -> EigenDecomp:
    """Full eigendecomposition of a symmetric matrix via cyclic Jacobi.

    Sweeps rotate every off-diagonal entry in lexicographic order until the
    off-diagonal Frobenius norm falls below ``1e-12`` relative to the input
    norm. Raises :class:`NoConvergence` if the sweep cap (100) is hit, and
    :class:`NotSymmetric` if the input fails the symmetry check.
    """
    m = check_symmetric(a)
    p = m.shape[0]
    work = m.copy()
    vecs = np.eye(p)
    tol = OFFDIAG_TOL * max(1.0, float(np.linalg.norm(m, "fro")))
    for _ in range(_max_sweeps):
        if _offdiag_norm(work) <= tol:
            break
        for k in range(p - 1):
            for l in range(k + 1, p):
                _rotate(work, vecs, k, l)
    else:
        if _offdiag_norm(work) > tol:
            raise NoConvergence(f"off-diagonal norm above tolerance after {_max_sweeps} sweeps")

    vals = np.diag(work).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(p):
        lead = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[lead, j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return EigenDecomp(vals, vecs)


def spectral_norm(a) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    return float(np.max(np.abs(sym_eig(a).eigenvalues)))


def inv_sqrt_sym(a, rel_floor: float = INV_SQRT_REL_FLOOR) -> np.ndarray:
    """Symmetric PSD inverse square root ``B`` with ``B a B = I``.

    Requires ``lambda_min(a) > rel_floor * lambda_max(a)``; otherwise raises
    :class:`NearSingular` reporting the eigenvalue ratio.
    """
    dec = sym_eig(a)
    lmax = float(dec.eigenvalues[0])
    lmin = float(dec.eigenvalues[-1])
    if lmax <= 0.0 or lmin <= rel_floor * lmax:
        ratio = lmin / lmax if lmax > 0.0 else float("nan")
        raise NearSingular(
            f"eigenvalue ratio {ratio:.3e} (min {lmin:.3e}, max {lmax:.3e}) "
            f"at or below floor {rel_floor:g}"
        )
    b = (dec.eigenvectors / np.sqrt(dec.eigenvalues)) @ dec.eigenvectors.T
    return (b + b.T) / 2.0


def cholesky(a) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == a`` for positive definite ``a``.

    Raises :class:`NotPositiveDefinite` naming the first failing pivot
    (pivot tolerance 1e-12).
    """
    m = check_symmetric(a)
    p = m.shape[0]
    low = np.zeros_like(m)
    for j in range(p):
        d = m[j, j] - low[j, :j] @ low[j, :j]
        if d <= CHOLESKY_PIVOT_TOL:
            raise NotPositiveDefinite(f"pivot {j} is {d:.3e}")
        low[j, j] = np.sqrt(d)
        if j + 1 < p:
            low[j + 1 :, j] = (m[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low


def _row_space_projector(v: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the row space of ``v`` (rows = basis)."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        v = v[None, :]
    if v.ndim != 2:
        raise ValueError(f"expected a basis matrix, got ndim={v.ndim}")
    rows, cols = v.shape
    if rows > cols:
        raise RankDeficient(f"{rows} rows cannot be independent in dimension {cols}")
    gram = v @ v.T
    dec = sym_eig(gram)
    vals = dec.eigenvalues
    # eigenvalues of the Gram matrix are squared singular values
    if vals[0] <= 0.0 or vals[-1] <= (RANK_RTOL**2) * vals[0]:
        raise RankDeficient(f"row rank below {rows}")
    gram_inv = dec.eigenvectors @ ((1.0 / vals)[:, None] * dec.eigenvectors.T)
    return v.T @ gram_inv @ v


def projection_distance(v1, v2) -> float:
    """Spectral norm of the difference of two row-space projectors.

    Arguments are bases given as rows. The result is invariant under any
    invertible recombination of the rows, symmetric in its arguments, and
    lies in [0, 1] when both bases have the same number of rows.
    """
    p1 = _row_space_projector(np.asarray(v1, dtype=float))
    p2 = _row_space_projector(np.asarray(v2, dtype=float))
    if p1.shape != p2.shape:
        raise ValueError("bases live in different ambient dimensions")
    return spectral_norm(p1 - p2)
