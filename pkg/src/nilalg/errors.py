"""Exception hierarchy shared by every module."""


class NilalgError(Exception):
    """Base class for all errors raised by the package."""


class FieldError(NilalgError):
    """The modulus is not a supported prime."""


class DimensionError(NilalgError):
    """Ambient dimensions or moduli of two operands disagree."""


class ContainmentError(NilalgError):
    """A subspace that was required to contain another does not."""


class EnumerationTooLarge(NilalgError):
    """An exhaustive enumeration would exceed its cap."""

    def __init__(self, what, required, cap):
        self.what = what
        self.required = required
        self.cap = cap
        super().__init__(f"{what}: required {required} exceeds cap {cap}")


class DomainError(NilalgError):
    """A map is evaluated outside of its domain."""


class PreconditionError(NilalgError):
    """An operation was called on inputs violating its precondition."""


class NotOnW(PreconditionError):
    """Points handed to the stabilizer probe do not satisfy [a,c] + [b,d] = 0."""


class ClassificationError(NilalgError):
    """The extension handed to classify_step is not a minimal strong extension."""


class InternalInconsistency(NilalgError):
    """A postcondition that the mathematics guarantees has failed; signals a bug."""


class BudgetExceeded(NilalgError):
    """Workspace growth would exceed the ambient dimension budget."""

    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(f"workspace ambient dimension {required} exceeds budget {budget}")


class AmalgamInvalid(NilalgError):
    """A free amalgam failed class-K validation."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class ParseError(NilalgError):
    """Malformed input file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
