"""Exception types shared across the library.

Every failure the library raises on purpose derives from :class:`EsirError`,
so callers can distinguish expected statistical/numerical failures from bugs.
"""


class EsirError(Exception):
    """Base class for all library-specific failures."""


class NotSymmetric(EsirError):
    """Input matrix is not symmetric within tolerance."""


class NoConvergence(EsirError):
    """Iterative eigensolver hit its sweep cap before converging."""


class NearSingular(EsirError):
    """Matrix too close to singular for a stable inverse square root."""


class NotPositiveDefinite(EsirError):
    """Cholesky pivot failed; message carries the pivot index."""


class RankDeficient(EsirError):
    """A basis matrix does not have full row rank."""


class DuplicatePoints(EsirError):
    """Coincident observations found under the strict zero-distance policy."""


class AllPairsDegenerate(EsirError):
    """Every observation pair was excluded as zero-distance."""


class TooFewPoints(EsirError):
    """Not enough observations for the requested slicing."""


class KTooLarge(EsirError):
    """Requested more directions than the data can identify."""


class DegenerateDirection(EsirError):
    """Candidate direction has (numerically) zero scatter."""


class RankDeficientDesign(EsirError):
    """Regression design matrix is rank deficient."""


class DegenerateSample(EsirError):
    """Sample has (numerically) zero standard deviation."""


class MissingCell(EsirError):
    """A requested table grid position has no simulation summary."""


class TooManyFailures(EsirError):
    """More than 10% of Monte Carlo replicates failed to fit."""
