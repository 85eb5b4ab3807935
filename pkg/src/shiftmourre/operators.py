"""Concrete operators on a periodic grid: shifts, differences, Q_j, H0, A, H.

Every operator is an :class:`OperatorHandle` whose ``apply_fn`` acts on
flat arrays of shape ``(N,)`` or ``(N, k)`` with ``N = n**d``.  Dense
matrices are built on demand by applying the operator to the identity and
are cached on the handle.

Shift convention: ``(T_j u)(x) = u(x + beta e_j)``, i.e. the value at grid
index ``i`` is pulled from index ``i + m`` (periodically wrapped).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ComplexPotential, DimensionMismatch, TooLargeForDense, ValidationError
from .grid import Field, GridSpec, forward_values, frequency_mesh, inverse_values

__all__ = [
    "DEFAULT_DENSE_CAP",
    "OperatorHandle",
    "identity_op",
    "shift_op",
    "difference_op",
    "coordinate_op",
    "multiplication_op",
    "fourier_multiplier_op",
    "q_op",
    "h0_op",
    "a_op",
    "a_op_decomposed",
    "potential_op",
    "hamiltonian",
    "commutator",
    "free_commutator_op",
    "weight_op",
    "matrix_exponential_group",
    "eigh_dense",
]

DEFAULT_DENSE_CAP = 4096


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    grid: GridSpec
    apply_fn: Callable[[np.ndarray], np.ndarray]
    label: str
    self_adjoint: bool = False
    fourier_diagonal: bool = False
    real_coefficients: bool = False
    symbol: np.ndarray | None = None
    diagonal: np.ndarray | None = None
    _dense: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, u: Field) -> Field:
        return self.apply(u)

    def apply(self, u: Field) -> Field:
        if u.grid != self.grid:
            raise DimensionMismatch("field and operator live on different grids")
        return Field(self.grid, self.apply_fn(u.flat().astype(complex)))

    def dense(self, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
        if self._dense is None:
            if self.grid.size > cap:
                raise TooLargeForDense(f"{self.label}: {self.grid.size} rows exceeds dense cap {cap}")
            mat = self.apply_fn(np.eye(self.grid.size, dtype=complex))
            if self.self_adjoint:
                mat = 0.5 * (mat + mat.conj().T)
            object.__setattr__(self, "_dense", mat)
        return self._dense

    # algebra -------------------------------------------------------------

    def _check(self, other: OperatorHandle) -> None:
        if not isinstance(other, OperatorHandle) or other.grid != self.grid:
            raise DimensionMismatch("operators live on different grids")

    def __matmul__(self, other: OperatorHandle) -> OperatorHandle:
        self._check(other)
        a, b = self.apply_fn, other.apply_fn
        dense = None
        if other._dense is not None:
            dense = a(other._dense)
        return OperatorHandle(
            self.grid,
            lambda u: a(b(u)),
            f"({self.label})({other.label})",
            real_coefficients=self.real_coefficients and other.real_coefficients,
            _dense=dense,
        )

    def _combine(self, other: OperatorHandle, sign: float, label: str) -> OperatorHandle:
        self._check(other)
        a, b = self.apply_fn, other.apply_fn
        dense = None
        if self._dense is not None and other._dense is not None:
            dense = self._dense + sign * other._dense
        symbol = None
        if self.symbol is not None and other.symbol is not None:
            symbol = self.symbol + sign * other.symbol
        return OperatorHandle(
            self.grid,
            lambda u: a(u) + sign * b(u),
            label,
            self_adjoint=self.self_adjoint and other.self_adjoint,
            fourier_diagonal=symbol is not None,
            real_coefficients=self.real_coefficients and other.real_coefficients,
            symbol=symbol,
            _dense=dense,
        )

    def __add__(self, other: OperatorHandle) -> OperatorHandle:
        return self._combine(other, 1.0, f"{self.label} + {other.label}")

    def __sub__(self, other: OperatorHandle) -> OperatorHandle:
        return self._combine(other, -1.0, f"{self.label} - {other.label}")

    def scale(self, c: complex) -> OperatorHandle:
        f = self.apply_fn
        c = complex(c)
        is_real = c.imag == 0
        return OperatorHandle(
            self.grid,
            lambda u: c * f(u),
            f"{c}*{self.label}",
            self_adjoint=self.self_adjoint and is_real,
            fourier_diagonal=self.fourier_diagonal,
            real_coefficients=self.real_coefficients and is_real,
            symbol=None if self.symbol is None else c * self.symbol,
            _dense=None if self._dense is None else c * self._dense,
        )

    def __mul__(self, c) -> OperatorHandle:
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self) -> OperatorHandle:
        return self.scale(-1.0)

    def adjoint(self, cap: int = DEFAULT_DENSE_CAP) -> OperatorHandle:
        if self.self_adjoint:
            return self
        mat = self.dense(cap).conj().T.copy()
        return from_dense(self.grid, mat, f"({self.label})*")


def from_dense(grid: GridSpec, mat: np.ndarray, label: str, **flags) -> OperatorHandle:
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (grid.size, grid.size):
        raise DimensionMismatch(f"matrix {mat.shape} does not match grid size {grid.size}")
    return OperatorHandle(grid, lambda u: mat @ u, label, _dense=mat, **flags)


def _grid_view(grid: GridSpec, u: np.ndarray) -> tuple[np.ndarray, bool]:
    vector = u.ndim == 1
    batch = 1 if vector else u.shape[1]
    return u.reshape(grid.shape + (batch,)), vector


def _flat(grid: GridSpec, v: np.ndarray, vector: bool) -> np.ndarray:
    out = v.reshape(grid.size, -1)
    return out[:, 0] if vector else out


def identity_op(grid: GridSpec) -> OperatorHandle:
    return OperatorHandle(grid, lambda u: u.copy(), "I", self_adjoint=True, fourier_diagonal=True,
                          real_coefficients=True, symbol=np.ones(grid.shape))


def shift_op(grid: GridSpec, j: int, sign: int = +1) -> OperatorHandle:
    """Translation by ``sign*beta`` along axis ``j`` (1-based); a permutation."""
    grid.check_axis(j)
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    step = -sign * grid.m

    def apply(u):
        v, vector = _grid_view(grid, u)
        return _flat(grid, np.roll(v, step, axis=j - 1), vector)

    xi = frequency_mesh(grid)[j - 1]
    label = f"T{j}" if sign > 0 else f"T{j}adj"
    return OperatorHandle(grid, apply, label, fourier_diagonal=True, real_coefficients=True,
                          symbol=np.exp(1j * sign * grid.beta * xi))


def difference_op(grid: GridSpec, j: int) -> OperatorHandle:
    """Forward difference quotient ``(T_j - 1)/beta``."""
    t = shift_op(grid, j, +1)
    op = (t - identity_op(grid)).scale(1.0 / grid.beta)
    return OperatorHandle(grid, op.apply_fn, f"D{j}", fourier_diagonal=True,
                          real_coefficients=True, symbol=op.symbol, _dense=op._dense)


def multiplication_op(grid: GridSpec, values, label: str = "mult") -> OperatorHandle:
    diag = np.asarray(values.values if isinstance(values, Field) else values).ravel()
    if diag.size != grid.size:
        raise DimensionMismatch("multiplier does not match grid")
    diag = diag.copy()
    diag.flags.writeable = False
    is_real = not np.iscomplexobj(diag) or not np.any(diag.imag)

    def apply(u):
        return diag * u if u.ndim == 1 else diag[:, None] * u

    return OperatorHandle(grid, apply, label, self_adjoint=is_real, real_coefficients=is_real,
                          diagonal=diag)


def coordinate_op(grid: GridSpec, j: int) -> OperatorHandle:
    return multiplication_op(grid, grid.coordinate(j).astype(float), f"x{j}")


def fourier_multiplier_op(grid: GridSpec, symbol: np.ndarray, label: str,
                          self_adjoint: bool | None = None) -> OperatorHandle:
    """Operator acting as ``inverse_transform(symbol * transform(u))``."""
    symbol = np.broadcast_to(np.asarray(symbol), grid.shape).copy()
    symbol.flags.writeable = False
    if self_adjoint is None:
        self_adjoint = not np.iscomplexobj(symbol) or not np.any(symbol.imag)

    def apply(u):
        v, vector = _grid_view(grid, u)
        s = symbol.reshape(grid.shape + (1,))
        return _flat(grid, inverse_values(grid, s * forward_values(grid, v)), vector)

    return OperatorHandle(grid, apply, label, self_adjoint=self_adjoint, fourier_diagonal=True,
                          symbol=symbol)


def q_op(grid: GridSpec, j: int) -> OperatorHandle:
    """``(T_j - T_j^*) / (2 i beta)``; Fourier symbol ``sin(beta xi_j)/beta``."""
    t, ts = shift_op(grid, j, +1), shift_op(grid, j, -1)
    op = (t - ts).scale(1.0 / (2j * grid.beta))
    xi = frequency_mesh(grid)[j - 1]
    return OperatorHandle(grid, op.apply_fn, f"Q{j}", self_adjoint=True, fourier_diagonal=True,
                          symbol=np.sin(grid.beta * xi) / grid.beta, _dense=op._dense)


def h0_op(grid: GridSpec) -> OperatorHandle:
    """Free Laplacian ``-1/2 sum d^2/dx_j^2`` as the multiplier ``|xi|^2 / 2``."""
    xi2 = sum(x**2 for x in frequency_mesh(grid))
    op = fourier_multiplier_op(grid, 0.5 * xi2, "H0", self_adjoint=True)
    return OperatorHandle(grid, op.apply_fn, "H0", self_adjoint=True, fourier_diagonal=True,
                          real_coefficients=True, symbol=op.symbol)


def a_op(grid: GridSpec) -> OperatorHandle:
    """Conjugate operator ``1/2 sum_j (Q_j x_j + x_j Q_j)``."""
    mats = []
    dense_ok = grid.size <= DEFAULT_DENSE_CAP
    parts = []
    for j in range(1, grid.d + 1):
        q, x = q_op(grid, j), coordinate_op(grid, j)
        parts.append((q, x))
        if dense_ok:
            qd = q.dense()
            xd = x.diagonal
            # Q_ab (x_a + x_b): exactly Hermitian in floating point
            mats.append(qd * (xd[:, None] + xd[None, :]))

    def apply(u):
        out = 0
        for q, x in parts:
            out = out + q.apply_fn(x.apply_fn(u)) + x.apply_fn(q.apply_fn(u))
        return 0.5 * out

    dense = None
    if dense_ok:
        dense = 0.5 * sum(mats)
    return OperatorHandle(grid, apply, "A", self_adjoint=True, _dense=dense)


def a_op_decomposed(grid: GridSpec, first_coefficient: complex | None = None) -> OperatorHandle:
    """Shift-form expansion ``c sum (x_j T_j - x_j T_j^*) + (1/4i) sum (T_j + T_j^*)``.

    ``c`` defaults to ``1/(2 i beta)``, the value for which this equals
    :func:`a_op` on states away from the wrap-around seam.
    """
    c = 1.0 / (2j * grid.beta) if first_coefficient is None else first_coefficient
    total = None
    for j in range(1, grid.d + 1):
        t, ts, x = shift_op(grid, j, 1), shift_op(grid, j, -1), coordinate_op(grid, j)
        term = (x @ t - x @ ts).scale(c) + (t + ts).scale(1.0 / 4j)
        total = term if total is None else total + term
    return OperatorHandle(grid, total.apply_fn, "A[shift form]", _dense=total._dense)


def potential_op(V: Field) -> OperatorHandle:
    vals = np.asarray(V.values)
    if np.iscomplexobj(vals):
        if np.max(np.abs(vals.imag), initial=0.0) > 1e-14:
            raise ComplexPotential("potential has a non-negligible imaginary part")
        vals = vals.real
    return multiplication_op(V.grid, vals.astype(float), "V")


def hamiltonian(grid: GridSpec, V: Field | None = None) -> OperatorHandle:
    h0 = h0_op(grid)
    if V is None:
        return h0
    if V.grid != grid:
        raise DimensionMismatch("potential lives on a different grid")
    v = potential_op(V)
    total = h0 + v
    return OperatorHandle(grid, total.apply_fn, "H", self_adjoint=True, real_coefficients=True,
                          diagonal=None, _dense=total._dense)


def commutator(a: OperatorHandle, b: OperatorHandle, cap: int = DEFAULT_DENSE_CAP) -> OperatorHandle:
    """``ab - ba`` with an eagerly built dense matrix."""
    if a.grid != b.grid:
        raise DimensionMismatch("operators live on different grids")
    ad, bd = a.dense(cap), b.dense(cap)
    fa, fb = a.apply_fn, b.apply_fn
    mat = fa(bd) - fb(ad)
    return OperatorHandle(a.grid, lambda u: fa(fb(u)) - fb(fa(u)), f"[{a.label}, {b.label}]",
                          _dense=mat)


def free_commutator_op(grid: GridSpec) -> OperatorHandle:
    """Analytic multiplier ``sum_j sin(beta xi_j) xi_j / beta`` of ``[H0, iA]``."""
    b = grid.beta
    sym = sum(np.sin(b * x) * x for x in frequency_mesh(grid)) / b
    op = fourier_multiplier_op(grid, sym, "[H0,iA]~", self_adjoint=True)
    return OperatorHandle(grid, op.apply_fn, op.label, self_adjoint=True, fourier_diagonal=True,
                          real_coefficients=True, symbol=op.symbol)


def eigh_dense(op: OperatorHandle, cap: int = DEFAULT_DENSE_CAP):
    """Eigenpairs of a self-adjoint handle, real arithmetic when possible."""
    mat = op.dense(cap)
    if op.real_coefficients and not np.any(mat.imag):
        return np.linalg.eigh(mat.real)
    return np.linalg.eigh(mat)


def weight_op(grid: GridSpec, kind: str, gamma: float, A: OperatorHandle | None = None,
              cap: int = DEFAULT_DENSE_CAP) -> OperatorHandle:
    """``<x>^{-gamma}`` (kind ``position``) or ``<A>^{-gamma}`` (kind ``conjugate``)."""
    if gamma < 0:
        raise ValidationError("gamma must be nonnegative")
    if kind in ("position", "pos"):
        r2 = sum(grid.coordinate(j) ** 2 for j in range(1, grid.d + 1))
        op = multiplication_op(grid, (1.0 + r2) ** (-gamma / 2), f"<x>^-{gamma}")
        return op
    if kind in ("conjugate", "conj"):
        if grid.size > cap:
            raise TooLargeForDense(f"conjugate weight needs dense A ({grid.size} > {cap})")
        A = a_op(grid) if A is None else A
        w, U = np.linalg.eigh(A.dense(cap))
        mat = (U * (1.0 + w**2) ** (-gamma / 2)) @ U.conj().T
        mat = 0.5 * (mat + mat.conj().T)
        return from_dense(grid, mat, f"<A>^-{gamma}", self_adjoint=True)
    raise ValidationError(f"unknown weight kind {kind!r}")


def matrix_exponential_group(A: OperatorHandle, t: float, cap: int = DEFAULT_DENSE_CAP) -> OperatorHandle:
    """Unitary ``exp(i t A)`` through the eigendecomposition of ``A``."""
    w, U = np.linalg.eigh(A.dense(cap))
    mat = (U * np.exp(1j * t * w)) @ U.conj().T
    return from_dense(A.grid, mat, f"exp({t}iA)")
