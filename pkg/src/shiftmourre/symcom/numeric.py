"""Dense-matrix evaluation of symbolic expressions on a grid.

Two independent routes exist.  :func:`numeric_eval` reads a normal form
term by term (diagonal coefficient times a permutation).
:func:`direct_eval` walks the unnormalized tree and composes handles from
:mod:`shiftmourre.operators`.  Where the normal form translated a
coordinate symbolically (``x_j + beta``) the two routes differ on rows next
to the periodic seam, so comparisons default to interior rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import operators as ops
from ..errors import DimensionMismatch, UnboundFunction
from ..grid import Field, GridSpec
from .expr import (
    CConst,
    CDiff,
    Commutator,
    Coord,
    CProd,
    CScale,
    CShift,
    CSum,
    Fun,
    Identity,
    Mult,
    Prod,
    Scale,
    ShiftOp,
    Sum,
)
from .normal import NormalForm, normalize
from .parser import parse

__all__ = ["numeric_eval", "direct_eval", "relative_error", "CrossCheck", "cross_check"]


def _binding(bindings, name, grid):
    if name not in bindings:
        raise UnboundFunction(f"no values bound for {name!r}")
    v = bindings[name]
    arr = np.asarray(v.values if isinstance(v, Field) else v)
    if arr.shape != grid.shape:
        arr = arr.reshape(grid.shape)
    return arr


def _translate(arr: np.ndarray, grid: GridSpec, s) -> np.ndarray:
    """Values at ``x + beta*s`` (periodic)."""
    out = arr
    for axis, k in enumerate(s[: grid.d]):
        if k:
            out = np.roll(out, -k * grid.m, axis=axis)
    return out


def _check_axes(nf: NormalForm, grid: GridSpec):
    if nf.max_axis() > grid.d:
        raise DimensionMismatch(f"expression uses axis {nf.max_axis()} on a {grid.d}-d grid")


def numeric_eval(nf, grid: GridSpec, bindings) -> np.ndarray:
    """Dense matrix of a normal form (text and trees are normalized first)."""
    if not isinstance(nf, NormalForm):
        nf = normalize(nf)
    _check_axes(nf, grid)
    N = grid.size
    mat = np.zeros((N, N), dtype=complex)
    index = np.arange(N).reshape(grid.shape)
    rows = np.arange(N)
    beta = grid.beta
    for word, poly in nf.words.items():
        coeff = np.zeros(grid.shape, dtype=complex)
        for mono, scalar in poly.terms.items():
            term = np.full(grid.shape, scalar.evaluate(beta), dtype=complex)
            for atom in mono:
                if atom[0] == "x":
                    term = term * grid.coordinate(atom[1])
                else:
                    term = term * _translate(_binding(bindings, atom[1], grid), grid, atom[2])
            coeff += term
        cols = _translate(index, grid, word).ravel()
        mat[rows, cols] += coeff.ravel()
    return mat


def _coeff_values(c, grid: GridSpec, bindings) -> np.ndarray:
    if isinstance(c, Coord):
        if c.j > grid.d:
            raise DimensionMismatch(f"x{c.j} on a {grid.d}-d grid")
        return grid.coordinate(c.j).astype(complex)
    if isinstance(c, Fun):
        return _binding(bindings, c.name, grid).astype(complex)
    if isinstance(c, CConst):
        return np.full(grid.shape, c.value.evaluate(grid.beta))
    if isinstance(c, CShift):
        s = [0] * grid.d
        s[c.j - 1] = c.sign
        return _translate(_coeff_values(c.arg, grid, bindings), grid, s)
    if isinstance(c, CDiff):
        v = _coeff_values(c.arg, grid, bindings)
        s = [0] * grid.d
        s[c.j - 1] = 1
        return (_translate(v, grid, s) - v) / grid.beta
    if isinstance(c, CSum):
        return sum(_coeff_values(t, grid, bindings) for t in c.terms)
    if isinstance(c, CProd):
        out = np.ones(grid.shape, dtype=complex)
        for f in c.factors:
            out = out * _coeff_values(f, grid, bindings)
        return out
    if isinstance(c, CScale):
        return c.scalar.evaluate(grid.beta) * _coeff_values(c.arg, grid, bindings)
    raise TypeError(f"not a coefficient expression: {c!r}")


def _handle(e, grid: GridSpec, bindings) -> ops.OperatorHandle:
    if isinstance(e, Identity):
        return ops.identity_op(grid)
    if isinstance(e, ShiftOp):
        return ops.shift_op(grid, e.j, e.sign)
    if isinstance(e, Mult):
        return ops.multiplication_op(grid, _coeff_values(e.coeff, grid, bindings))
    if isinstance(e, Sum):
        out = _handle(e.terms[0], grid, bindings)
        for t in e.terms[1:]:
            out = out + _handle(t, grid, bindings)
        return out
    if isinstance(e, Prod):
        out = _handle(e.factors[0], grid, bindings)
        for f in e.factors[1:]:
            out = out @ _handle(f, grid, bindings)
        return out
    if isinstance(e, Scale):
        return _handle(e.arg, grid, bindings).scale(e.scalar.evaluate(grid.beta))
    if isinstance(e, Commutator):
        return ops.commutator(_handle(e.left, grid, bindings), _handle(e.right, grid, bindings))
    raise TypeError(f"not an operator expression: {e!r}")


def direct_eval(e, grid: GridSpec, bindings) -> np.ndarray:
    """Dense matrix obtained by composing operator handles along the tree."""
    if isinstance(e, str):
        e = parse(e)
    return _handle(e, grid, bindings).dense()


def relative_error(a: np.ndarray, b: np.ndarray, rows=None) -> float:
    """Frobenius ``|a - b| / max(|b|, tiny)``, optionally on a row subset."""
    if rows is not None:
        a, b = a[rows], b[rows]
    scale = max(np.linalg.norm(b), np.finfo(float).tiny)
    return float(np.linalg.norm(a - b) / scale)


@dataclass(frozen=True)
class CrossCheck:
    full_error: float
    interior_error: float

    def ok(self, tol: float = 1e-10) -> bool:
        return self.interior_error <= tol


def cross_check(e, grid: GridSpec, bindings) -> CrossCheck:
    """Compare the normal-form route against direct composition."""
    if isinstance(e, str):
        e = parse(e)
    a = numeric_eval(normalize(e), grid, bindings)
    b = direct_eval(e, grid, bindings)
    rows = grid.interior_mask().ravel()
    return CrossCheck(relative_error(a, b), relative_error(a, b, rows))
