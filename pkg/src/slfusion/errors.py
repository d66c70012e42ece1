"""Exception types raised by slfusion.

Every error carries its class name as the stable identifier that the CLI
prints on the diagnostic stream.
"""


class SLError(Exception):
    """Base class for all slfusion errors."""


class ValidationError(SLError, ValueError):
    """An opinion, base rate or set violates a type invariant."""


class AdditivityViolation(ValidationError):
    pass


class NegativeMass(ValidationError):
    pass


class InvalidKey(ValidationError):
    pass


class BaseRateNotNormalized(ValidationError):
    pass


class InvalidDomain(ValidationError):
    pass


class EmptySet(ValidationError):
    pass


class ZeroBaseRateSet(SLError):
    pass


class DogmaticOpinion(SLError):
    """A dogmatic opinion has no finite evidence representation."""


class DomainViolation(SLError):
    """A density was evaluated outside its support."""


class NoDogmaticOpinion(SLError):
    pass


class BadOverride(SLError):
    pass


class FusionError(SLError):
    """Base class for errors raised while fusing opinions."""


class EmptyInput(FusionError):
    pass


class DomainMismatch(FusionError):
    pass


class HyperInputUnsupported(FusionError):
    pass


class TotalConflict(FusionError):
    pass


class BaseRateMismatch(FusionError):
    pass


class UnknownOperator(FusionError):
    pass


class DogmaticInput(FusionError):
    pass


class AllVacuous(FusionError):
    pass


class InputError(SLError):
    """A fixture file failed to parse or validate.

    ``problems`` holds one message per violation, each naming the actor when
    one is known.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
