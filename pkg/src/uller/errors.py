"""Exception hierarchy shared by the parser, evaluators and CLI."""

from __future__ import annotations


class UllerError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(UllerError):
    """Lexing or parsing failure, with a position into the source text."""

    def __init__(self, message: str, span: tuple[int, int] = (0, 0), expected: list[str] | None = None):
        self.message = message
        self.span = span
        self.expected = expected or []
        super().__init__(f"{message} at line {span[0]}, column {span[1]}")


class DuplicateBinder(UllerError):
    """Same variable bound twice within one binder group."""


class EvalError(UllerError):
    """Base class for evaluation-time failures."""


class UnboundVariable(EvalError):
    pass


class UnknownConstant(EvalError):
    pass


class UnknownDomain(EvalError):
    pass


class UnknownFunction(EvalError):
    pass


class UnknownPredicate(EvalError):
    pass


class ArityMismatch(EvalError):
    pass


class MissingTableRow(EvalError):
    pass


class PropertyOnNonRecord(EvalError):
    pass


class MissingProperty(EvalError):
    pass


class ArithTypeError(EvalError):
    pass


class PredTypeError(EvalError):
    pass


class TrueOnNonUnit(EvalError):
    """`true()` applied to a value that is neither boolean nor in [0, 1]."""


class InfiniteDomain(EvalError):
    """A continuous or infinite codomain was requested where only finite enumeration is supported."""


class ZeroProbability(EvalError):
    """Log-loss of an event with probability zero."""


class BudgetExceeded(EvalError):
    """Evaluation exceeded the configured node budget."""


class InvalidSampleCount(UllerError):
    pass


class ZeroProbabilitySample(EvalError):
    pass


class EmptyCandidateSet(UllerError):
    pass


class NonFiniteGradient(UllerError):
    pass


class SchemaError(UllerError):
    """Interpretation file does not match the JSON schema; carries the offending JSON path."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{message} (at {path})")


class UnknownDomainElement(UllerError):
    pass
