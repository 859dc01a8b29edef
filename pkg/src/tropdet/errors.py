"""Error hierarchy. Each class carries the CLI exit code used for it."""


class TropdetError(Exception):
    exit_code = 1
    kind = "error"

    def to_json(self):
        return {"error": {"kind": self.kind, "message": str(self)}}


class InputFormatError(TropdetError, ValueError):
    exit_code = 3
    kind = "malformed_input"


class DimensionError(TropdetError, ValueError):
    exit_code = 4
    kind = "dimension_mismatch"


class BudgetExceeded(TropdetError, RuntimeError):
    """Raised when a search would exceed its budget. The answer is undecided, not negative."""

    exit_code = 5
    kind = "undecided_at_budget"


class PreconditionError(TropdetError, ValueError):
    exit_code = 6
    kind = "precondition_failed"


class NotInPrevariety(PreconditionError):
    kind = "not_in_prevariety"


class InvalidPlaneError(PreconditionError):
    kind = "invalid_plane"


class ConsistencyError(TropdetError, RuntimeError):
    """Two independent code paths disagreed. Signals a bug or invalid input."""

    exit_code = 7
    kind = "internal_consistency"
