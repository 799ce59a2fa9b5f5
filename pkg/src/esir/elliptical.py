"""Samplers for elliptically contoured covariates.

A draw is ``mu + xi * A @ u`` where ``A @ A.T`` equals the scatter matrix,
``u`` is uniform on the unit sphere, and ``xi`` is a nonnegative radial
variable that sets the tail weight. Radial recipes are normalized so that the
covariance of a draw equals the scatter matrix whenever the family has second
moments; heavier-tailed families (Cauchy, t with df <= 2, F-ratio) keep their
canonical scale since no covariance exists.

All sampling takes an explicit ``numpy.random.Generator``; identical seeds
give bit-identical output. Within one call, unit directions are drawn before
radial lengths (changing that order would change seeded streams).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg

_RADIAL_FAMILIES = ("normal", "student_t", "laplace", "logistic", "f_ratio")

# scale constants for the logistic radial law, keyed by dimension;
# estimated once per dimension from a fixed-seed Monte Carlo run
_LOGISTIC_CAL_DRAWS = 1_000_000
_LOGISTIC_CAL_SEED = 714025
_logistic_scale_cache: dict[int, float] = {}


@dataclass(frozen=True)
class GeneratorKind:
    """Tag for the radial (generating-variable) family.

    Use the factory functions (:func:`normal`, :func:`student_t`, ...) or
    :func:`generator_from_name` instead of constructing directly.
    """

    family: str
    nu: float | None = None
    d1: float | None = None
    d2: float | None = None

    def __post_init__(self):
        if self.family not in _RADIAL_FAMILIES:
            raise ValueError(f"unknown radial family {self.family!r}")
        if self.family == "student_t" and (self.nu is None or self.nu <= 0):
            raise ValueError("student_t needs degrees of freedom > 0")
        if self.family == "f_ratio" and (
            self.d1 is None or self.d2 is None or self.d1 <= 0 or self.d2 <= 0
        ):
            raise ValueError("f_ratio needs positive degrees of freedom")


def normal() -> GeneratorKind:
    return GeneratorKind("normal")


def student_t(nu: float) -> GeneratorKind:
    return GeneratorKind("student_t", nu=float(nu))


def cauchy() -> GeneratorKind:
    """Cauchy is Student t with one degree of freedom."""
    return student_t(1.0)


def laplace() -> GeneratorKind:
    return GeneratorKind("laplace")


def logistic() -> GeneratorKind:
    return GeneratorKind("logistic")


def f_ratio(d1: float, d2: float) -> GeneratorKind:
    return GeneratorKind("f_ratio", d1=float(d1), d2=float(d2))


def generator_from_name(name: str, p: int) -> GeneratorKind:
    """Resolve a distribution label like ``"t3"``, ``"cauchy"`` or ``"ec1"``.

    ``p`` is the dimension of the elliptical vector; it is only consulted for
    the ``ec1`` label, which maps to an F(p, 1) radial variable.
    """
    text = name.strip().lower()
    if text == "normal":
        return normal()
    if text == "laplace":
        return laplace()
    if text == "logistic":
        return logistic()
    if text == "cauchy":
        return cauchy()
    if text == "ec1":
        return f_ratio(p, 1.0)
    if text.startswith("t"):
        body = text[1:].strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        try:
            return student_t(float(body))
        except ValueError:
            pass
    raise ValueError(f"unknown covariate distribution {name!r}")


@dataclass(frozen=True)
class EllipticalSpec:
    """Location, scatter and radial family of one elliptical law."""

    mu: np.ndarray
    sigma: np.ndarray
    generator: GeneratorKind

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError(f"scatter must be square, got shape {sigma.shape}")
        if mu.ndim != 1 or mu.shape[0] != sigma.shape[0]:
            raise ValueError(
                f"location length {mu.shape} does not match scatter dim {sigma.shape[0]}"
            )
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class Dataset:
    """An n x p covariate matrix paired with an n-vector response."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"x must be 2-d, got shape {x.shape}")
        if y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError("y must be a vector with one entry per row of x")
        if x.shape[0] < 2:
            raise ValueError("need at least 2 observations")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("non-finite values in dataset")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def _unit_rows(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """n rows uniform on the unit sphere in R^p."""
    z = rng.standard_normal((n, p))
    norms = np.linalg.norm(z, axis=1)
    while np.any(norms == 0.0):  # probability ~0, but keep the contract exact
        bad = norms == 0.0
        z[bad] = rng.standard_normal((int(bad.sum()), p))
        norms = np.linalg.norm(z, axis=1)
    return z / norms[:, None]


def sample_unit_sphere(p: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw from the unit sphere in R^p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return _unit_rows(1, p, rng)[0]


def _logistic_radius_sq(p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws with density proportional to r^(p-1) * exp(-r) / (1+exp(-r))^2.

    Rejection against a Gamma(p, 1) envelope; the acceptance probability is
    sigmoid(r)^2, bounded below by 1/4.
    """
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(64, 2 * (n - filled))
        r = rng.gamma(p, 1.0, m)
        u = rng.random(m)
        sig = 1.0 / (1.0 + np.exp(-r))
        keep = r[u <= sig * sig]
        take = min(keep.shape[0], n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


def _logistic_scale(p: int) -> float:
    """Constant c with E(c * R) = p for the logistic radius-squared law R."""
    c = _logistic_scale_cache.get(p)
    if c is None:
        rng = np.random.default_rng(_LOGISTIC_CAL_SEED + p)
        mean_r = float(_logistic_radius_sq(p, _LOGISTIC_CAL_DRAWS, rng).mean())
        c = p / mean_r
        _logistic_scale_cache[p] = c
    return c


def _radial(kind: GeneratorKind, p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n radial draws for the given family in dimension p.

    Recipes:
      normal      xi = ||Z_p||
      student_t   xi = ||Z_p|| * sqrt(nu / W), W ~ chi2(nu); for nu > 2 the
                  extra factor sqrt((nu-2)/nu) restores E(xi^2) = p
      laplace     xi = sqrt(E) * ||Z_p||, E ~ Exponential(1)
      logistic    xi^2 = c_p * R with R from the rejection sampler above
      f_ratio     xi ~ F(d1, d2) directly (canonical scale, no second moment)
    """
    if kind.family == "normal":
        return np.linalg.norm(rng.standard_normal((n, p)), axis=1)
    if kind.family == "student_t":
        nu = float(kind.nu)
        z = np.linalg.norm(rng.standard_normal((n, p)), axis=1)
        w = rng.chisquare(nu, n)
        xi = z * np.sqrt(nu / w)
        if nu > 2.0:
            xi = xi * np.sqrt((nu - 2.0) / nu)
        return xi
    if kind.family == "laplace":
        z = np.linalg.norm(rng.standard_normal((n, p)), axis=1)
        return np.sqrt(rng.exponential(1.0, n)) * z
    if kind.family == "logistic":
        r = _logistic_radius_sq(p, n, rng)
        return np.sqrt(_logistic_scale(p) * r)
    if kind.family == "f_ratio":
        return rng.f(kind.d1, kind.d2, n)
    raise ValueError(f"unknown radial family {kind.family!r}")


def sample_generating_variable(kind: GeneratorKind, p: int, rng: np.random.Generator) -> float:
    """One radial draw; see :func:`_radial` for the per-family recipes."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(_radial(kind, p, 1, rng)[0])


def sample_elliptical(spec: EllipticalSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent rows from the elliptical law given by ``spec``.

    Each row is ``mu + xi_i * A @ u_i`` with ``A`` the Cholesky factor of the
    scatter matrix and ``xi_i`` independent of ``u_i``. Propagates
    :class:`~esir.errors.NotPositiveDefinite` for an invalid scatter.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = linalg.cholesky(spec.sigma)
    p = spec.dim
    u = _unit_rows(n, p, rng)
    xi = _radial(spec.generator, p, n, rng)
    return spec.mu + (xi[:, None] * u) @ a.T
