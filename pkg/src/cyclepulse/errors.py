"""Exception hierarchy.

Each exception carries an ``exit_code`` used by the command line front end:
2 for input validation, 3 for infeasible synthesis, 4 for numerical guards.
"""


class ControlError(Exception):
    exit_code = 1


class ValidationError(ControlError):
    exit_code = 2


class TooFewLevels(ValidationError):
    pass


class NonIncreasingLevels(ValidationError):
    pass


class IncompatibleProtocol(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NegativeDuration(ValidationError):
    pass


class ScheduleMismatch(ValidationError):
    pass


class UnnormalizedInput(ValidationError):
    pass


class NonHermitianInput(ValidationError):
    pass


class StepTooLarge(ValidationError):
    pass


class InfeasibleModuli(ControlError):
    exit_code = 3


class NoReferenceSlot(ControlError):
    exit_code = 3


class NumericalGuardError(ControlError):
    exit_code = 4


class NormDriftExceeded(NumericalGuardError):
    pass


class SynthesisVerificationError(NumericalGuardError):
    """Forward simulation of a synthesized schedule missed its target."""


class ClosureIterationLimit(NumericalGuardError):
    pass
