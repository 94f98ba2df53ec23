"""Exception hierarchy.

Everything raised on purpose derives from :class:`WillmoreKitError`, split
into numerical failures and invalid input, so the command line can map each
family onto its exit code.
"""


class WillmoreKitError(Exception):
    """Base class for all package errors."""


class NumericalError(WillmoreKitError):
    """A numerical routine could not deliver the requested accuracy."""


class InputError(WillmoreKitError):
    """Inputs, parameters or geometric conditions are not admissible."""


# -- numerics ---------------------------------------------------------------

class NonFiniteCoefficient(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class NonFiniteIntegrand(NumericalError):
    pass


class TailNotConvergent(NumericalError):
    pass


class AccuracyNotReached(NumericalError):
    pass


class InsufficientSamples(NumericalError):
    pass


class NonMonotoneTail(NumericalError):
    pass


# -- geometry ---------------------------------------------------------------

class InvalidParameters(InputError):
    pass


class ProfileNegative(InputError):
    pass


class EnvelopeNotIntegrable(InputError):
    pass


class InadmissibleLambda(InputError):
    pass


class ConditionsFailed(InputError):
    pass


class ConfigError(InputError):
    pass


class MissingFiberDiameter(InputError):
    pass


class MethodDisagreement(NumericalError):
    pass


# -- verification -----------------------------------------------------------

class InequalityViolated(WillmoreKitError):
    """A comparison inequality failed beyond tolerance.

    ``where`` is the worst offending abscissa and ``margin`` the (negative)
    margin there.
    """

    def __init__(self, message, where=None, margin=None):
        super().__init__(message)
        self.where = where
        self.margin = margin


class MonotonicityViolated(InequalityViolated):
    pass
