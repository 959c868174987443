"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CwpError(Exception):
    """Base class for all domain errors raised by :mod:`cwp`."""


class ValidationError(CwpError):
    """A circuit or SLP violates a structural invariant.

    ``ident`` names the offending gate/variable when there is one.
    """

    def __init__(self, message: str, ident: str | None = None) -> None:
        super().__init__(message)
        self.ident = ident


class UndeclaredGate(ValidationError):
    pass


class ForwardReference(ValidationError):
    pass


class DuplicateId(ValidationError):
    pass


class BadConstant(ValidationError):
    pass


class MissingOutput(ValidationError):
    pass


class MissingStart(ValidationError):
    pass


class UnboundVariable(CwpError):
    pass


class BadModulus(CwpError):
    pass


class TooLarge(CwpError):
    pass


class TooLong(CwpError):
    """Raised by :func:`cwp.slp.expand`; ``length`` is the exact word length."""

    def __init__(self, length: int, max_len: int) -> None:
        super().__init__(f"word length {length} exceeds limit {max_len}")
        self.length = length
        self.max_len = max_len


class NotPositive(CwpError):
    pass


class NotVariableFree(CwpError):
    pass


class UnknownLetter(CwpError):
    pass


class BadLetter(UnknownLetter):
    pass


class BadIndex(CwpError):
    pass


class DimensionMismatch(CwpError):
    pass


class NotInvertible(CwpError):
    pass


class BadBase(CwpError):
    pass


class RingMismatch(CwpError):
    pass


class ExponentTooLarge(CwpError):
    pass


class NotMonic(CwpError):
    pass


class NotMonicInY(NotMonic):
    pass


class ZeroDivisor(CwpError):
    pass


class NotTriangular(CwpError):
    pass


class BadPartition(CwpError):
    pass


class DegreeMismatch(CwpError):
    pass


class NotSkew(CwpError):
    pass


class NotPowerfulSkew(CwpError):
    pass


class ScheduleTooShort(CwpError):
    pass


class BadParams(CwpError):
    pass


class InconsistentCosetSystem(CwpError):
    pass


class BadKind(CwpError):
    pass


class FormatError(CwpError):
    """Malformed JSON input for one of the file formats."""
