"""Exception types raised across the package."""


class SymdivError(ValueError):
    """Base class for every error this package raises on bad input."""


class DistributionError(SymdivError):
    """A weight vector cannot be turned into a probability distribution.

    ``index`` names the offending atom when one is identifiable.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class RejectNonPositive(DistributionError):
    pass


class RejectLength(DistributionError):
    pass


class RejectSum(DistributionError):
    pass


class RejectNonFinite(DistributionError):
    pass


class RejectZeroWithNoSmoothing(DistributionError):
    pass


class RejectAllZero(DistributionError):
    pass


class DimensionMismatch(SymdivError):
    pass


class DomainError(SymdivError):
    pass


class DenominatorVanishes(SymdivError):
    pass


class NonFiniteRatio(SymdivError):
    pass
