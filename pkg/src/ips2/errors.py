"""Error contract and exception hierarchy for ips2."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel


class ErrorCode(str, Enum):
    """Categories of failures raised by the library."""

    PARSE = "Parse"
    SIZE = "Size"
    PARAMETER = "Parameter"
    INDEX = "Index"
    DOMAIN = "Domain"
    CONVERGENCE = "Convergence"
    USAGE = "Usage"
    UNKNOWN = "Unknown"


class ErrorContract(BaseModel):
    """Serializable description of a failure, stored on failed runs."""

    code: str
    title: str
    detail: str = ""


class Ips2Error(Exception):
    """Base class for every error raised by ips2."""

    code: ErrorCode = ErrorCode.UNKNOWN

    def __init__(self, title: str, detail: str = "") -> None:
        """Initialize the error with a short title and optional detail."""
        super().__init__(title)
        self.title = title
        self.detail = detail

    @property
    def error_info(self) -> ErrorContract:
        """Return the error as a serializable contract."""
        return ErrorContract(code=self.code.value, title=self.title, detail=self.detail)


class ParseError(Ips2Error, ValueError):
    """Malformed input file."""

    code = ErrorCode.PARSE

    def __init__(
        self, title: str, row: int | None = None, col: int | None = None
    ) -> None:
        """Initialize with the offending 0-based row and column, when known."""
        where = []
        if row is not None:
            where.append(f"row={row}")
        if col is not None:
            where.append(f"col={col}")
        super().__init__(title, detail=", ".join(where))
        self.row = row
        self.col = col


class SizeError(Ips2Error, ValueError):
    """Shapes or counts violate an operation's contract."""

    code = ErrorCode.SIZE


class ParameterError(Ips2Error, ValueError):
    """A numeric parameter is outside its valid range."""

    code = ErrorCode.PARAMETER


class TensorIndexError(Ips2Error, IndexError):
    """Sample or flat index out of range for the unfolding."""

    code = ErrorCode.INDEX


class DomainError(Ips2Error, ValueError):
    """Input values outside the mathematical domain (e.g. negative affinities)."""

    code = ErrorCode.DOMAIN


class ConvergenceError(Ips2Error):
    """Iterative solver stopped before meeting its tolerance."""

    code = ErrorCode.CONVERGENCE

    def __init__(self, title: str, best_residual: float) -> None:
        """Initialize with the smallest residual reached."""
        super().__init__(title, detail=f"best_residual={best_residual:.3e}")
        self.best_residual = best_residual


class UsageError(Ips2Error):
    """Invalid command-line or experiment request."""

    code = ErrorCode.USAGE


__all__ = [
    "ConvergenceError",
    "DomainError",
    "ErrorCode",
    "ErrorContract",
    "Ips2Error",
    "ParameterError",
    "ParseError",
    "SizeError",
    "TensorIndexError",
    "UsageError",
]
