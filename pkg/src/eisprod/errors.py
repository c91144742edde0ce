"""Exception hierarchy shared by all modules."""


class EisprodError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(EisprodError, ZeroDivisionError):
    pass


class ConductorMismatch(EisprodError, ValueError):
    pass


class InvalidGaloisExponent(EisprodError, ValueError):
    pass


class InvalidSubstitutionMatrix(EisprodError, ValueError):
    pass


class NotARepresentation(EisprodError, ValueError):
    pass


class UnsupportedWeight(EisprodError, ValueError):
    pass


class NotWeightTwo(EisprodError, ValueError):
    pass


class OracleNotConvergent(EisprodError, ValueError):
    pass


class InconclusivePrecision(EisprodError, ArithmeticError):
    pass


class TwistRequiresIntegralExpansion(EisprodError, ValueError):
    pass


class NeedMoreCoefficients(EisprodError, ValueError):
    def __init__(self, required, available=None):
        self.required = required
        self.available = available
        msg = f"target needs at least {required} coefficients"
        if available is not None:
            msg += f" (has {available})"
        super().__init__(msg)


class RefusedUnverified(EisprodError, ValueError):
    pass


class RankUnstable(EisprodError, ArithmeticError):
    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"rank did not stabilize within precision budget {budget}")


class NotCovered(EisprodError, ValueError):
    pass
