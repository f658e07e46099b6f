"""
Exception hierarchy shared by the library and the command line.

Library code raises these; only the CLI turns them into "❌ ..." lines and exit codes.
"""


class OrbifoldError(Exception):
    exit_code = 1


class InputParseError(OrbifoldError, ValueError):
    """Malformed input: files, scenario names, presentations, mismatched dimensions."""
    exit_code = 2


class BudgetExceeded(OrbifoldError):
    exit_code = 3

    def __init__(self, message: str, explored: int = 0):
        super().__init__(message)
        self.explored = explored


class GroupTooLarge(BudgetExceeded):
    """Closure stopped at the order cap. `explored` is the partial element count."""


class InternalConsistencyError(OrbifoldError):
    """An exact post-condition failed (non-integral average, bad verification)."""
    exit_code = 4


class UnsupportedSector(OrbifoldError):
    exit_code = 5
