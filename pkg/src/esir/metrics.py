"""Evaluation metrics: subspace R-squared, OLS diagnostics, normality check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm as _std_normal

from .errors import DegenerateDirection, DegenerateSample, RankDeficientDesign
from .linalg import check_symmetric
from .sdr import SdrFit

KS_CRITICAL_05 = 1.358  # asymptotic 5% critical value, scaled by 1/sqrt(n)


@dataclass(frozen=True)
class TruthSpec:
    """The true direction rows and the population scatter used by R-squared."""

    b_true: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b_true, dtype=float)
        if b.ndim == 1:
            b = b[None, :]
        sigma = check_symmetric(self.sigma)
        if b.shape[1] != sigma.shape[0]:
            raise ValueError("direction length does not match scatter dimension")
        object.__setattr__(self, "b_true", b)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class OlsReport:
    """Least-squares summary for the post-fit regression diagnostics."""

    coefficients: np.ndarray
    r_squared: float
    adjusted_r2: float
    f_statistic: float
    dof: tuple[int, int]
    n_used: int


def r_squared(b, truth: TruthSpec) -> float:
    """Squared multiple correlation of a direction with the true subspace.

    For direction ``b``, true rows ``B`` and scatter ``S`` this is the maximum
    over beta in the row span of ``B`` of ``(b S beta')^2 / (b S b' * beta S
    beta')``, computed in closed form as

        b S B' (B S B')^{-1} B S b' / (b S b')

    which is the Rayleigh-quotient maximizer over the span (validated against
    a brute-force grid oracle in the test suite). Scale-invariant in ``b`` and
    invariant to the choice of basis of the span; always in [0, 1].
    """
    b = np.asarray(b, dtype=float).ravel()
    sigma = truth.sigma
    if b.shape[0] != sigma.shape[0]:
        raise ValueError("direction length does not match scatter dimension")
    sb = sigma @ b
    denom = float(b @ sb)
    if denom <= 1e-14:
        raise DegenerateDirection(f"b Sigma b' = {denom:.3e}")
    bt = truth.b_true
    gram = bt @ sigma @ bt.T
    rhs = bt @ sb
    value = float(rhs @ np.linalg.solve(gram, rhs)) / denom
    return float(min(1.0, max(0.0, value)))


def avg_r_squared(fit: SdrFit, truth: TruthSpec) -> float:
    """Mean R-squared of the fitted directions against the true subspace."""
    if fit.k != truth.b_true.shape[0]:
        raise ValueError(
            f"fit has {fit.k} directions but truth has {truth.b_true.shape[0]}"
        )
    return float(np.mean([r_squared(row, truth) for row in fit.directions]))


def ols_fit(design, response) -> OlsReport:
    """Least squares with intercept, plus adjusted R-squared and overall F.

    ``design`` is n x q without the intercept column. Raises
    :class:`RankDeficientDesign` when the augmented design is rank deficient
    (singular value ratio below 1e-10) and :class:`DegenerateSample` for a
    constant response.
    """
    design = np.asarray(design, dtype=float)
    response = np.asarray(response, dtype=float).ravel()
    if design.ndim != 2:
        raise ValueError(f"design must be 2-d, got shape {design.shape}")
    n, q = design.shape
    if response.shape[0] != n:
        raise ValueError("response length does not match design rows")
    if n <= q + 1:
        raise ValueError(f"need n > q+1 = {q + 1} observations, got {n}")

    x = np.column_stack([np.ones(n), design])
    coef, _, _, sv = np.linalg.lstsq(x, response, rcond=None)
    if sv[0] <= 0.0 or sv[-1] <= 1e-10 * sv[0]:
        raise RankDeficientDesign(f"singular value ratio {sv[-1] / sv[0]:.3e}")

    resid = response - x @ coef
    ss_res = float(resid @ resid)
    centered = response - response.mean()
    ss_tot = float(centered @ centered)
    if ss_tot <= 1e-14:
        raise DegenerateSample("constant response")
    r2 = 1.0 - ss_res / ss_tot
    dof_den = n - q - 1
    adjusted = 1.0 - (1.0 - r2) * (n - 1) / dof_den
    if r2 >= 1.0:
        f_stat = float("inf")
    else:
        f_stat = (r2 / q) / ((1.0 - r2) / dof_den)
    return OlsReport(coef, r2, adjusted, f_stat, (q, dof_den), n)


def ks_normality(sample) -> tuple[float, bool]:
    """One-sample normality check on the standardized data.

    Standardizes by the sample mean and standard deviation, compares the
    empirical CDF with the standard normal CDF, and rejects at the 5% level
    when the statistic exceeds ``1.358 / sqrt(n)``. Standardizing first makes
    the nominal critical value conservative, which suits its screening role.
    """
    sample = np.asarray(sample, dtype=float).ravel()
    n = sample.shape[0]
    if n < 20:
        raise ValueError(f"need at least 20 observations, got {n}")
    sd = float(sample.std(ddof=1))
    if sd < 1e-14:
        raise DegenerateSample("zero standard deviation")
    z = np.sort((sample - sample.mean()) / sd)
    cdf = _std_normal.cdf(z)
    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - cdf))
    d_minus = float(np.max(cdf - (grid - 1.0 / n)))
    stat = max(d_plus, d_minus)
    return stat, stat > KS_CRITICAL_05 / np.sqrt(n)


def excess_kurtosis(sample) -> float:
    """Moment estimator m4 / m2^2 - 3 (0 for a normal population)."""
    sample = np.asarray(sample, dtype=float).ravel()
    centered = sample - sample.mean()
    m2 = float(np.mean(centered**2))
    if m2 < 1e-28:
        raise DegenerateSample("zero variance")
    m4 = float(np.mean(centered**4))
    return m4 / (m2 * m2) - 3.0
