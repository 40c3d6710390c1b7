"""Exception types shared across the package."""


class LCompleteError(Exception):
    pass


class MalformedInput(LCompleteError, ValueError):
    """Shapes, schemas or parameters that do not make sense."""


class ContractViolation(LCompleteError):
    """A morphism or object fails a defining invariant (e.g. ill-defined matrix)."""


class UnsupportedInput(LCompleteError):
    """The operation is not available for this kind of input."""


class PreconditionError(LCompleteError):
    """An object lies outside the subcategory an operation is defined on."""


class InvariantViolation(LCompleteError, AssertionError):
    """Something that is a theorem failed to hold; always a bug."""
