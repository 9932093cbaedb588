"""Exception types shared across the package."""


class QpcError(Exception):
    """Base class for package errors."""


class PrecisionExhausted(QpcError):
    """An operation would return noise at the current working precision."""


class GrowthHypothesisError(QpcError):
    """delta * e^{lambda0} is too small for the product growth floor to apply."""


class DenseOverflowError(QpcError):
    """Densifying a polar form would overflow the working float range."""


class DegenerateInputError(QpcError):
    """Input violates a non-degeneracy hypothesis (tangency, double root, ...)."""


class DepthExhausted(QpcError):
    """The continued-fraction expansion is too short for the request."""


class ChainExhausted(QpcError):
    """No admissible denominator remains in the condition-(A) subsequence."""


class InfeasibleConstruction(QpcError):
    """A constructor cannot satisfy the requested constraints."""


class RootCountInstability(QpcError):
    """Critical-point count changes under grid refinement (window boundary)."""


class QuadratureError(QpcError):
    """Adaptive quadrature could not meet the requested tolerance."""


class RefinementError(QpcError):
    """Critical-point refinement failed (coefficient conditions, divergence, or
    multiple sign changes)."""


class ConfigError(QpcError):
    """Invalid run configuration; message names the offending field."""
