"""Exception types shared across the package."""

from __future__ import annotations


class MdpmonError(Exception):
    """Base class for all package-specific errors."""


class TraceImpossible(MdpmonError):
    """The observed trace has probability zero under every scheduler."""


class InstanceTooLarge(MdpmonError):
    """Oracle enumeration would exceed the configured work cap."""


class AlphabetMismatch(MdpmonError):
    """Sensor action alphabet does not match the world state set."""


class NumericPrecision(MdpmonError):
    """Interval iteration failed to close the gap within the iteration cap."""


class StepTimeout(MdpmonError):
    """A single monitor feed exceeded its time budget; the session is dead."""


class SessionDead(MdpmonError):
    """Feed called on a session that already failed or timed out."""


class ModelError(MdpmonError):
    """Base class for model file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ModelSyntaxError(ModelError):
    pass


class UndeclaredSymbol(ModelError):
    pass


class DuplicateDeclaration(ModelError):
    pass


class ValidationFailure(ModelError):
    """Raised when a parsed model violates structural invariants."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        listing = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid model: {listing}")


class UnknownObservation(ModelError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown observation {name!r} at position {position}")


class EmptyTrace(ModelError):
    pass
