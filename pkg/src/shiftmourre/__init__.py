"""Shift-built conjugate operators, commutator algebra and positive-commutator numerics."""

from .errors import NumericalError, ShiftMourreError, ValidationError
from .grid import Field, GridSpec, frequencies, inverse_transform, make_grid, transform

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GridSpec",
    "NumericalError",
    "ShiftMourreError",
    "ValidationError",
    "__version__",
    "frequencies",
    "inverse_transform",
    "make_grid",
    "transform",
]
