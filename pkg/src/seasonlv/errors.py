"""Exception types shared across the package."""


class SeasonLVError(Exception):
    """Base class for all package errors."""


class InvalidParams(SeasonLVError, ValueError):
    """Model constants fail validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid model parameters: " + ", ".join(map(str, self.violations)))


class InvalidState(SeasonLVError, ValueError):
    """State vector is negative, non-finite or of the wrong shape."""


class InvalidConfig(SeasonLVError, ValueError):
    pass


class Inadmissible(SeasonLVError):
    """Operation requires r_i > 0 for the species involved."""


class StepBudgetExceeded(SeasonLVError):
    pass


class NonFiniteState(SeasonLVError):
    pass


class NewtonDivergence(SeasonLVError):
    pass


class NonHyperbolic(SeasonLVError):
    """A fixed point has an eigenvalue of modulus (numerically) equal to one."""


class Degenerate(SeasonLVError):
    """The instance sits on a boundary between stable equivalence classes."""

    def __init__(self, reasons):
        self.reasons = list(reasons)
        super().__init__("degenerate instance: " + "; ".join(self.reasons))


class UnknownSignature(SeasonLVError):
    pass


class WrongClass(SeasonLVError):
    pass
