"""Exception hierarchy shared by every module of the package."""


class LorentzError(ValueError):
    """Base class for all domain errors raised by lorentzfp."""


class NotInLocalization(LorentzError):
    """A rational whose denominator is divisible by the field characteristic."""


class ZeroInput(LorentzError):
    pass


class FieldMismatch(LorentzError):
    pass


class NotPrime(LorentzError):
    pass


class NotLorentz(LorentzError):
    pass


class ZeroAlpha(LorentzError):
    pass


class NonSquareAlpha(LorentzError):
    pass


class NoHalving(LorentzError):
    pass


class NotRotation(LorentzError):
    pass


class NotUnitNorm(LorentzError):
    pass


class DomainMismatch(LorentzError):
    pass


class DegenerateDenominator(LorentzError):
    pass


class NotOrthochronousProper(LorentzError):
    pass


class BoundTooLarge(LorentzError):
    pass


class SearchExhausted(LorentzError):
    """The candidate budget ran out before a qualifying prime was found."""


class MemoryBudgetExceeded(LorentzError):
    pass


class FormatError(LorentzError):
    """Malformed matrix or set JSON."""
