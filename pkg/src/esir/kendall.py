"""Multivariate Kendall's tau matrix estimation.

The sample statistic averages, over all unordered observation pairs, the
outer product of the pair difference scaled by its squared length:

    M_hat = 2 / (n (n-1)) * sum_{i' < i}  d d^T / ||d||^2,   d = x_i - x_{i'}

Each kernel term has trace exactly 1 and is positive semidefinite, so the
average is a trace-1 PSD matrix whose eigenvectors track the scatter
eigenvectors of an elliptical law regardless of tail weight. Computation is
O(n^2 p): a lexicographic per-anchor loop at small n, and a blocked
Gram-matrix form at large n. Both are deterministic for a given input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllPairsDegenerate, DuplicatePoints, TooFewPoints
from .linalg import check_symmetric, sym_eig

PAIR_TOL = 1e-12
DIRECT_MAX_N = 256
BLOCK = 256  # keeps per-block work cache-resident

ZERO_DIST_POLICIES = ("skip", "error")


@dataclass(frozen=True)
class TauMatrix:
    """A p x p multivariate Kendall's tau matrix (symmetric, PSD, trace 1)."""

    m: np.ndarray

    @property
    def dim(self) -> int:
        return self.m.shape[0]


def _pair_tolerances(x: np.ndarray) -> np.ndarray:
    # a pair (i' < i) counts as zero-distance when ||x_i - x_i'|| < tol[i]
    return PAIR_TOL * (1.0 + np.linalg.norm(x, axis=1))


def _pairs_direct(x: np.ndarray, tol: np.ndarray) -> tuple[np.ndarray, int]:
    """Sum of weighted pair outer products, anchors in lexicographic order."""
    n, p = x.shape
    acc = np.zeros((p, p))
    included = 0
    for j in range(n - 1):
        d = x[j + 1 :] - x[j]
        dist2 = np.einsum("ij,ij->i", d, d)
        keep = dist2 >= tol[j + 1 :] ** 2
        if not keep.all():
            d = d[keep]
            dist2 = dist2[keep]
        if d.shape[0]:
            w = 1.0 / dist2
            acc += (d * w[:, None]).T @ d
            included += d.shape[0]
    return acc, included


def _pairs_blocked(x: np.ndarray, tol: np.ndarray, block: int = BLOCK) -> tuple[np.ndarray, int]:
    """Same sum as :func:`_pairs_direct` via the expansion

        sum w d d^T = X^T diag(s) X - (C + C^T),  C = sum_{i>j} w_ij x_i x_j^T

    with s_i the total weight of pairs containing i. Only O(block^2) memory.
    """
    n, p = x.shape
    sq = np.einsum("ij,ij->i", x, x)
    thr_all = tol**2
    s = np.zeros(n)
    cross = np.zeros((p, p))
    included = 0
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        xi = x[i0:i1]
        for j0 in range(0, i0 + 1, block):
            j1 = min(j0 + block, n)
            xj = x[j0:j1]
            g = xi @ xj.T
            g *= -2.0
            g += sq[i0:i1, None]
            g += sq[None, j0:j1]
            # keep pairs whose squared distance clears the larger index's
            # threshold; i >= j throughout, so that is the row index here
            keep = g >= thr_all[i0:i1, None]
            if i0 == j0:
                keep &= np.tri(i1 - i0, j1 - j0, -1, dtype=bool)
            with np.errstate(divide="ignore", over="ignore"):
                w = np.where(keep, 1.0 / g, 0.0)
            included += int(np.count_nonzero(keep))
            s[i0:i1] += w.sum(axis=1)
            s[j0:j1] += w.sum(axis=0)
            cross += xi.T @ (w @ xj)
    acc = (x * s[:, None]).T @ x - (cross + cross.T)
    return acc, included


def kendall_tau(x, zero_dist_policy: str = "skip") -> TauMatrix:
    """Sample multivariate Kendall's tau matrix of the rows of ``x``.

    Under the default ``"skip"`` policy, pairs closer than
    ``1e-12 * (1 + ||x_i||)`` are excluded and the average renormalized by the
    surviving pair count; under ``"error"`` such pairs raise
    :class:`DuplicatePoints`. Raises :class:`AllPairsDegenerate` when nothing
    survives.
    """
    if zero_dist_policy not in ZERO_DIST_POLICIES:
        raise ValueError(f"zero_dist_policy must be one of {ZERO_DIST_POLICIES}")
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"x must be 2-d, got shape {x.shape}")
    n = x.shape[0]
    if n < 2:
        raise TooFewPoints("need at least 2 observations")
    if not np.isfinite(x).all():
        raise ValueError("non-finite values in x")

    tol = _pair_tolerances(x)
    if n <= DIRECT_MAX_N:
        acc, included = _pairs_direct(x, tol)
    else:
        acc, included = _pairs_blocked(x, tol)

    total = n * (n - 1) // 2
    excluded = total - included
    if excluded and zero_dist_policy == "error":
        raise DuplicatePoints(f"{excluded} zero-distance pair(s)")
    if included == 0:
        raise AllPairsDegenerate("every pair of rows is zero-distance")
    m = acc / included
    return TauMatrix((m + m.T) / 2.0)


def population_tau_eigenvalues_mc(
    sigma_eigenvalues, mc_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Monte Carlo estimate of the tau-matrix eigenvalues for a given scatter.

    For scatter eigenvalues ``l_1 .. l_p``, the j-th tau eigenvalue is
    ``E[ l_j Q_j^2 / (l_1 Q_1^2 + ... + l_p Q_p^2) ]`` with ``Q`` standard
    normal. Estimates sum to 1 up to round-off. When the input is sorted
    descending the output is returned sorted descending as well, which keeps
    the exact monotone ordering that Monte Carlo jitter could otherwise break
    on near-ties.
    """
    vals = np.asarray(sigma_eigenvalues, dtype=float)
    if vals.ndim != 1 or vals.shape[0] < 1:
        raise ValueError("sigma_eigenvalues must be a nonempty vector")
    if np.any(vals <= 0.0):
        raise ValueError("all scatter eigenvalues must be positive")
    if mc_draws < 10_000:
        raise ValueError("mc_draws must be at least 10000")
    p = vals.shape[0]
    if p == 1:
        return np.ones(1)

    chunk = 262_144
    acc = np.zeros(p)
    done = 0
    while done < mc_draws:
        m = min(chunk, mc_draws - done)
        q2 = rng.standard_normal((m, p)) ** 2
        num = q2 * vals
        num /= num.sum(axis=1)[:, None]
        acc += num.sum(axis=0)
        done += m
    est = acc / mc_draws
    if np.all(np.diff(vals) <= 0.0):
        est = np.sort(est)[::-1]
    return est


def tau_vs_covariance_alignment(x, sigma) -> float:
    """Worst misalignment between sample tau eigenvectors and scatter ones.

    Returns ``max_j (1 - |<v_hat_j, v_j>|)`` over indices ``j`` whose scatter
    eigenvalue is separated from every neighbor by more than 5% of the top
    eigenvalue; returns 0.0 by convention when no index qualifies (for
    example, a fully tied spectrum).
    """
    x = np.asarray(x, dtype=float)
    sig = check_symmetric(sigma)
    n, p = x.shape
    if n < p + 1:
        raise TooFewPoints(f"need at least p+1={p + 1} observations, got {n}")
    if p == 1:
        return 0.0
    dec_tau = sym_eig(kendall_tau(x).m)
    dec_sig = sym_eig(sig)
    svals = dec_sig.eigenvalues
    gap = 0.05 * float(svals[0])
    worst = 0.0
    for j in range(p):
        sep_lo = j == 0 or (svals[j - 1] - svals[j]) > gap
        sep_hi = j == p - 1 or (svals[j] - svals[j + 1]) > gap
        if sep_lo and sep_hi:
            inner = abs(float(dec_tau.eigenvectors[:, j] @ dec_sig.eigenvectors[:, j]))
            worst = max(worst, 1.0 - inner)
    return worst
