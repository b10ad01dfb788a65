"""Exception types shared across the package."""


class HornError(Exception):
    """Base class for all computation errors raised by :mod:`horn`."""


class TraceError(HornError, ValueError):
    pass


class DominanceError(HornError, ValueError):
    pass


class DimensionMismatch(HornError, ValueError):
    pass


class SumMismatch(HornError, ValueError):
    pass


class EigenFailure(HornError, RuntimeError):
    pass


class CutoffTooSmall(HornError, ValueError):
    pass


class DegenerateSpectrum(HornError, ValueError):
    pass


class NoRealTriple(HornError, ValueError):
    pass


class ReductionFailure(HornError, RuntimeError):
    """Trigonometric reduction left monomials that are not even in cos."""


class PeriodUndetermined(HornError, RuntimeError):
    pass
