"""Exception types shared across the package."""


class LattBuildError(Exception):
    """Base class for every error raised by lattbuild."""


class NotPrimePower(LattBuildError, ValueError):
    pass


class OrderTooLarge(LattBuildError, ValueError):
    pass


class DomainError(LattBuildError, ValueError):
    pass


class DimensionMismatch(LattBuildError, ValueError):
    pass


class SingularMatrix(LattBuildError, ValueError):
    pass


class PrecisionOverflow(LattBuildError, ArithmeticError):
    """A lattice left the finite t-adic precision window."""


class NotContained(LattBuildError, ValueError):
    pass


class NotInWindow(LattBuildError, ValueError):
    pass


class NotAdjacent(LattBuildError, ValueError):
    pass


class NotClose(LattBuildError, ValueError):
    pass


class NotSpecial(LattBuildError, ValueError):
    pass


class NotInCommonApartment(LattBuildError, ValueError):
    pass


class FaceNotInComplex(LattBuildError, ValueError):
    pass


class EnumerationTooLarge(LattBuildError, RuntimeError):
    pass
