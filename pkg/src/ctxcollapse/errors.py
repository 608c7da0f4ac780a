"""Exception hierarchy shared by every module."""


class CollapseError(Exception):
    """Base class for all errors raised by ctxcollapse."""


class NonHermitianInput(CollapseError, ValueError):
    pass


class NumericalFailure(CollapseError, ArithmeticError):
    pass


class UnknownSpectralPoint(CollapseError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DomainMismatch(CollapseError, ValueError):
    pass


class BasisMismatch(CollapseError, ValueError):
    pass


class NotCoarseGraining(CollapseError, ValueError):
    pass


class InvalidRelation(CollapseError, ValueError):
    pass


class SearchSpaceTooLarge(CollapseError, RuntimeError):
    pass
