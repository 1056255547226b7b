"""
Error types shared by every layer of reduct-atlas.

Each error carries the exit code the CLI reports for it:
0 ok, 2 usage/bounds, 3 internal check, 4 precondition, 5 property violation.
"""

import time
from typing import Any, Dict, Optional


class ReductAtlasError(Exception):
    """Base class for all library errors."""

    exit_code = 3

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": str(self),
            "type": type(self).__name__,
            "details": self.details,
        }


# exit 2: usage and bounds

class BoundsExceeded(ReductAtlasError):
    exit_code = 2


class InvalidPrime(ReductAtlasError, ValueError):
    exit_code = 2


class ParseError(ReductAtlasError, ValueError):
    exit_code = 2


class BudgetExceeded(ReductAtlasError):
    exit_code = 2


class TimeLimitExceeded(ReductAtlasError):
    exit_code = 2


# exit 3: internal verification

class InternalCheckError(ReductAtlasError):
    exit_code = 3


class IndependenceViolation(ReductAtlasError):
    exit_code = 3


# exit 4: preconditions

class PreconditionViolated(ReductAtlasError):
    exit_code = 4


class MissingAutV(PreconditionViolated):
    pass


class DimensionTooSmall(PreconditionViolated):
    pass


class NotClassCompatible(PreconditionViolated):
    pass


class NotNormal(PreconditionViolated):
    pass


class DegenerateSpan(PreconditionViolated):
    pass


# exit 5: property violations

class PropertyViolation(ReductAtlasError):
    exit_code = 5


class TrichotomyViolation(PropertyViolation):
    pass


# plain bad input

class DegreeMismatch(ReductAtlasError, ValueError):
    exit_code = 2


class InvalidPartition(ReductAtlasError, ValueError):
    exit_code = 2


class EmptySetError(ReductAtlasError, ValueError):
    exit_code = 2


class OutOfRange(ReductAtlasError, ValueError):
    exit_code = 2


def check_deadline(deadline: Optional[float], what: str = "computation") -> None:
    """Raise TimeLimitExceeded once time.monotonic() passes `deadline` (None means no limit)."""
    if deadline is not None and time.monotonic() > deadline:
        raise TimeLimitExceeded(f"{what} exceeded the configured time limit")
