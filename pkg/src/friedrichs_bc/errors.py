"""Exception hierarchy shared by all modules."""


class FriedrichsError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimension(FriedrichsError, ValueError):
    pass


class DegenerateForm(FriedrichsError, ValueError):
    pass


class NotADirectSum(FriedrichsError, ValueError):
    pass


class NotBijectiveRealisation(FriedrichsError, ValueError):
    pass


class InvalidW2(FriedrichsError, ValueError):
    """Complement subspace is not non-positive for the boundary form."""


class NotMBoundary(FriedrichsError, ValueError):
    """Operator fails the (M)-boundary conditions."""


class NotInvertible(FriedrichsError, ArithmeticError):
    pass


class NotAGenerator(FriedrichsError, ValueError):
    pass


class InvalidParameter(FriedrichsError, ValueError):
    pass


class ParseError(FriedrichsError, ValueError):
    pass
