"""Exception hierarchy shared by all solver modules."""


class RegschedError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(RegschedError, ValueError):
    """Malformed problem data."""


class NonPositiveWeight(InstanceError):
    pass


class InvalidInterval(InstanceError):
    pass


class DuplicateJobId(InstanceError):
    pass


class EmptyInstance(InstanceError):
    pass


class InvalidScenario(InstanceError):
    pass


class InvalidSchedule(InstanceError):
    pass


class MismatchedInstance(RegschedError, ValueError):
    """A schedule or scenario does not belong to the instance it is used with."""


class UnnormalizedInstance(InstanceError):
    pass


class TooLarge(RegschedError, ValueError):
    """Brute-force guard exceeded."""


class FractionalSolution(RegschedError, ValueError):
    pass


class NumericalFailure(RegschedError, ArithmeticError):
    pass


class InvalidWarmStart(RegschedError, ValueError):
    pass


class NonUnitWeights(RegschedError, ValueError):
    pass


class InvalidBlockCount(RegschedError, ValueError):
    pass


class InvalidSize(RegschedError, ValueError):
    pass


class MethodUnavailable(RegschedError, ValueError):
    pass
