"""Exception hierarchy shared by the library and the command line tool."""

from typing import Optional


class ParabolicChernError(ValueError):
    """Base class for every error raised by parabolic_chern."""

    exit_code = 1


class ScenarioParseError(ParabolicChernError):
    """Scenario input could not be read (bad JSON, wrong types, floats, bad rationals)."""

    exit_code = 2


class InvariantViolation(ParabolicChernError):
    """Input data breaks a documented invariant."""

    exit_code = 3

    def __init__(self, invariant: str, message: str):
        """Initialize the violation.

        Args:
            invariant: Short name of the violated invariant
            message: Human readable details
        """
        super().__init__(f"[{invariant}] {message}")
        self.invariant = invariant
        self.details = message


class UnsupportedRankError(ParabolicChernError):
    """A rank-2-only operation was called with another rank."""

    exit_code = 4

    def __init__(self, operation: str, rank: Optional[int]):
        super().__init__(f"{operation} requires rank 2 (got rank {rank})")
        self.operation = operation
        self.rank = rank


class CheckFailure(ParabolicChernError):
    """An exact identity that must hold did not."""

    exit_code = 5
