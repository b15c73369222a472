"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class HdecError(Exception):
    """Base class for every error raised by hdec."""


class ValidationError(HdecError):
    """The input is syntactically fine but violates a structural rule."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class ArityError(ValidationError):
    pass


class UnknownVariable(ValidationError):
    pass


class ModeViolation(ValidationError):
    pass


class CoefficientOutOfRange(ValidationError):
    pass


class MixedUind(ValidationError):
    """A UIND relating a non-interpreted position to an interpreted one."""


class MixedFd(ValidationError):
    """An FD whose lhs or rhs spans both sides of the interpreted boundary."""


class NoInterpretedPosition(ValidationError):
    pass


class NegationNotSingleAtom(HdecError):
    """Negating a conjunction of UTVPIs needs BUTVPI mode."""


class ResourceLimit(HdecError):
    """The BUTVPI search exceeded its node budget (this is not Unsat)."""


class AlphaViolatesUniqueValue(HdecError):
    pass


class NotDpControllable(HdecError):
    pass


class PreconditionViolated(HdecError):
    pass


class WitnessCheckFailed(HdecError):
    """A produced witness did not survive direct re-evaluation (a bug)."""
