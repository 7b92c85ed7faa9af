"""Exception hierarchy shared by all modules."""


class MonomialSegreError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(MonomialSegreError):
    """Vector lengths or variable counts disagree."""


class DegenerateConfigurationError(MonomialSegreError):
    """No full-dimensional starting simplex exists in the given placement order."""


class ClassificationError(MonomialSegreError):
    """A triangulation is not of the pyramid-then-place shape required for blow-up cell classification."""


class EmptyCenterError(MonomialSegreError):
    """Attempted to blow up along a pair of divisors whose intersection is known empty."""


class LevelMismatchError(MonomialSegreError):
    """A class was fed to an operation of a ring it does not live on."""


class NoAdmissibleCenterError(MonomialSegreError):
    """A non-divisor presentation admits no incomparability-witnessed center; indicates a model bug."""


class TowerDivergenceError(MonomialSegreError):
    """Principalization did not reach a divisor within the iteration cap."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
