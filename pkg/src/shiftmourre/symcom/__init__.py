"""Symbolic algebra of lattice shifts and multiplication operators."""

from .expr import format_expr
from .normal import NormalForm, Term, equal, normalize
from .parser import parse

__all__ = ["parse", "normalize", "equal", "format_expr", "NormalForm", "Term"]
