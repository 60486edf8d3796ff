"""
Error hierarchy for the weylfiber engine.

Every failure an engine operation can report is a subclass of
``WeylFiberError`` carrying a stable ``code`` and the process ``exit_code``
the command line uses for it (1 for failed preconditions, 2 for input that
never made it past parsing, 3 for a broken engine invariant).
"""

from __future__ import annotations

from typing import Optional


class WeylFiberError(Exception):
    """Base class for all domain errors."""

    code: str = "E_INTERNAL"
    exit_code: int = 1

    def __init__(self, message: str = "") -> None:
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class NonIntegral(WeylFiberError):
    code = "E_NON_INTEGRAL"


class DivisionByZero(WeylFiberError):
    code = "E_DIVISION_BY_ZERO"


class MixedAmbient(WeylFiberError):
    code = "E_MIXED_AMBIENT"


class ZeroElement(WeylFiberError):
    code = "E_ZERO_ELEMENT"


class RankMismatch(WeylFiberError):
    code = "E_RANK_MISMATCH"


class ZeroModule(WeylFiberError):
    code = "E_ZERO_MODULE"


class UnsupportedAmbient(WeylFiberError):
    code = "E_UNSUPPORTED_AMBIENT"


class IndexOutOfRange(WeylFiberError):
    code = "E_INDEX_OUT_OF_RANGE"


class NotMinimalDimension(WeylFiberError):
    code = "E_NOT_MINIMAL_DIMENSION"


class NotSaturated(WeylFiberError):
    code = "E_NOT_SATURATED"


class NotSameModule(WeylFiberError):
    code = "E_NOT_SAME_MODULE"


class NotHolonomic(WeylFiberError):
    code = "E_NOT_HOLONOMIC"


class RightModule(WeylFiberError):
    code = "E_RIGHT_MODULE"


class NotAComplex(WeylFiberError):
    code = "E_NOT_A_COMPLEX"


class EngineLimitExceeded(WeylFiberError):
    """Raised when a configured S-pair or saturation bound is hit."""

    code = "E_ENGINE_LIMIT"


class InternalInvariant(WeylFiberError):
    """An engine invariant did not hold."""

    code = "E_INTERNAL"
    exit_code = 3


class ParseError(WeylFiberError):
    """
    Malformed session input.

    Parameters
    ----------
    message : str
        Human readable description.
    line : int
        1-based line of the offending token.
    column : int
        1-based column of the offending token.
    token : Optional[str]
        The offending token text, if any.
    """

    code = "E_PARSE"
    exit_code = 2

    def __init__(self, message: str, line: int = 0, column: int = 0, token: Optional[str] = None) -> None:
        super().__init__(message)
        self.line = line
        self.column = column
        self.token = token

    def __str__(self) -> str:
        where = f"line {self.line}, column {self.column}"
        if self.token is not None:
            return f"{self.message} at {where} near {self.token!r}"
        return f"{self.message} at {where}"

    def to_dict(self) -> dict:
        out = super().to_dict()
        out.update({"line": self.line, "column": self.column, "token": self.token})
        return out


class UndeclaredName(ParseError):
    code = "E_UNDECLARED_NAME"


class RingMismatch(ParseError):
    code = "E_RING_MISMATCH"
