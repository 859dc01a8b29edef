"""Exact arithmetic for tropical determinantal varieties and their positive parts."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetExceeded,
    ConsistencyError,
    DimensionError,
    InputFormatError,
    InvalidPlaneError,
    NotInPrevariety,
    PreconditionError,
    TropdetError,
)
from .semiring_core import MinorIndex, Permutation, SignPattern, TropicalMatrix  # noqa: E402

__all__ = [
    "BudgetExceeded",
    "ConsistencyError",
    "DimensionError",
    "InputFormatError",
    "InvalidPlaneError",
    "MinorIndex",
    "NotInPrevariety",
    "Permutation",
    "PreconditionError",
    "SignPattern",
    "TropdetError",
    "TropicalMatrix",
]
