"""Exception types shared across the package."""


class QTodaError(Exception):
    """Base class for library-specific failures."""


class DenominatorVanishes(QTodaError):
    """Numeric evaluation could not certify the denominator away from zero."""


class DegreeBoundExceeded(QTodaError):
    """A partition or polynomial exceeds the session degree bound."""


class InvalidTau(QTodaError):
    """The deformation parameter is 0 or -1, where the formulas degenerate."""


class NonCoprime(QTodaError):
    """The lattice type (a, b) must consist of coprime positive integers."""


class IncompatibleStep(QTodaError):
    """Two shift-operator series have steps with no usable common refinement."""


class NonInvertibleLeading(QTodaError):
    """Series inversion needs an invertible coefficient at an extreme power."""


class RelationViolated(QTodaError):
    """A machine-checked operator identity failed; carries the first offender."""

    def __init__(self, message, power=None, residual=None):
        super().__init__(message)
        self.power = power
        self.residual = residual


class MismatchAt(QTodaError):
    """Two build routes disagree; carries the first differing shift power."""

    def __init__(self, message, power=None):
        super().__init__(message)
        self.power = power


class TruncationInsufficient(QTodaError):
    """The requested window cannot be certified from the available terms."""


class UnsupportedFlow(QTodaError):
    """The requested lattice flow is not defined for these session parameters."""


class NonFinite(QTodaError):
    """A trajectory left the range of double precision."""
