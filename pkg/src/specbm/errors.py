"""Exception taxonomy shared by all specbm modules."""


class SpecbmError(Exception):
    """Base class for all specbm errors."""


class NonFinite(SpecbmError):
    """A matrix or vector contains NaN or Inf entries."""


class NoConvergence(SpecbmError):
    """An iterative routine exhausted its iteration budget."""


class RankDeficient(SpecbmError):
    """A cross-product matrix has a singular value below tolerance."""


class DegenerateBlock(SpecbmError):
    """A block model has a community with zero expected degree (W_k = 0)."""


class SingularDegree(SpecbmError):
    """A (regularized) degree is zero where a positive one is required."""


class ProbOutOfRange(SpecbmError):
    """A probability entry falls outside [0, 1]."""


class MissingTheta(SpecbmError):
    """A degree-corrected operation was invoked without theta values."""


class TooFewPoints(SpecbmError):
    """Fewer points than clusters requested."""


class EmptySet(SpecbmError):
    """An operation on point sets received an empty set."""


class DegenerateGrid(SpecbmError):
    """The regularizer grid cannot be built (average degree <= 1)."""


class EmptyCluster(SpecbmError):
    """An estimated community is empty."""


class ZeroCommunityDegree(SpecbmError):
    """An estimated community has no incident edges."""


class AllInfinite(SpecbmError):
    """Every grid point of a tau selection hit the infinite sentinel."""


class LengthMismatch(SpecbmError):
    """Two label vectors differ in length."""


class MissingCell(SpecbmError):
    """A requested summary cell has no records."""
