"""Exception types shared across the engine."""

from __future__ import annotations


class QuantumGoError(Exception):
    """Base class for all engine errors."""


class InvalidCoordinateError(QuantumGoError):
    """A coordinate string or tuple does not name a point on the board."""


class EmptyPointError(QuantumGoError):
    """An operation that needs a stone was given an empty point."""


class IllegalMoveError(QuantumGoError):
    """A move was rejected.  `code` is a stable machine-readable reason."""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


class ProtocolViolationError(QuantumGoError):
    """A ChoiceProvider answered outside the allowed option set."""


class NotFinalizedError(QuantumGoError):
    """Scoring was attempted while entangled pairs are still on the board."""


class UnsupportedVariantError(QuantumGoError):
    """A variant operation was asked for on a board it is not defined on."""


class ParseError(QuantumGoError):
    """A record could not be parsed.  Carries the offending line number."""

    def __init__(self, line: int, code: str, detail: str = ""):
        self.line = line
        self.code = code
        self.detail = detail
        super().__init__(f"line {line}: {code}" + (f" ({detail})" if detail else ""))


class ReplayDivergenceError(QuantumGoError):
    """A recorded move could not be applied to the reconstructed state."""

    def __init__(self, move_number: int, reason: str):
        self.move_number = move_number
        self.reason = reason
        super().__init__(f"divergence at move {move_number}: {reason}")
