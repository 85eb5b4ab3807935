"""Periodic box discretization and the unitary Fourier transform on it.

The box is ``[-L, L)^d`` sampled with ``n`` points per axis.  The shift
length ``beta`` must be an integer number ``m`` of grid spacings so that a
translation by ``beta`` is an exact index permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NonCommensurate, TooCoarse, ValidationError

__all__ = [
    "GridSpec",
    "Field",
    "make_grid",
    "frequencies",
    "transform",
    "inverse_transform",
]

_COMMENSURATE_RTOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with an exactly representable shift.

    Use :func:`make_grid` rather than the constructor; it checks the
    commensurability and resolution constraints.
    """

    d: int
    L: float
    n: int
    beta: float
    m: int

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def window_top(self) -> float:
        """Upper end ``(pi/beta)**2 / 2`` of the positive-commutator window."""
        return 0.5 * (np.pi / self.beta) ** 2

    @cached_property
    def axis(self) -> np.ndarray:
        """Sawtooth coordinate samples ``-L + i*h`` in ``[-L, L-h]``."""
        x = -self.L + self.h * np.arange(self.n)
        x.flags.writeable = False
        return x

    def coordinate(self, j: int) -> np.ndarray:
        """Values of ``x_j`` (1-based axis) on the full grid."""
        self.check_axis(j)
        shape = [1] * self.d
        shape[j - 1] = self.n
        return np.broadcast_to(self.axis.reshape(shape), self.shape)

    def radius(self) -> np.ndarray:
        r2 = sum(self.coordinate(j) ** 2 for j in range(1, self.d + 1))
        return np.sqrt(r2)

    def interior_mask(self, margin: float | None = None) -> np.ndarray:
        """Points with ``|x_j| <= L - margin`` on every axis (default margin 4*beta)."""
        if margin is None:
            margin = 4.0 * self.beta
        mask = np.ones(self.shape, dtype=bool)
        for j in range(1, self.d + 1):
            mask &= np.abs(self.coordinate(j)) <= self.L - margin + 1e-12 * self.L
        return mask

    def check_axis(self, j: int) -> None:
        if not 1 <= j <= self.d:
            raise ValidationError(f"axis {j} outside 1..{self.d}")

    def with_L(self, L: float) -> GridSpec:
        """Same spacing and shift, different box size."""
        n = int(round(2 * L / self.h))
        return make_grid(self.d, L, n, self.beta)


def make_grid(d: int, L: float, n: int, beta: float) -> GridSpec:
    """Validate and build a :class:`GridSpec`.

    Raises
    ------
    NonCommensurate
        If ``beta / h`` is not an integer.
    TooCoarse
        If fewer than 4 grid steps make up ``beta`` or ``n < 4*m``.
    """
    if not 1 <= int(d) <= 3:
        raise ValidationError(f"dimension must be 1, 2 or 3, got {d}")
    if int(n) != n or n % 2 or n <= 0:
        raise ValidationError(f"n must be a positive even integer, got {n}")
    if not L > 0 or not beta > 0:
        raise ValidationError("L and beta must be positive")
    h = 2.0 * L / n
    ratio = beta / h
    m = int(round(ratio))
    if m == 0 or abs(ratio - m) > _COMMENSURATE_RTOL * max(ratio, 1.0):
        raise NonCommensurate(f"beta/h = {ratio!r} is not an integer")
    if m < 4 or n < 4 * m:
        raise TooCoarse(f"need m >= 4 and n >= 4m, got m={m}, n={n}")
    return GridSpec(int(d), float(L), int(n), float(beta), m)


def frequencies(grid: GridSpec) -> np.ndarray:
    """Ascending frequency samples ``pi*k/L`` for ``k = -n/2 .. n/2-1``."""
    k = np.arange(-grid.n // 2, grid.n // 2)
    return np.pi * k / grid.L


def frequency_mesh(grid: GridSpec) -> list[np.ndarray]:
    """Per-axis frequency arrays broadcast over the full grid, 1-based order."""
    xi = frequencies(grid)
    return list(np.meshgrid(*([xi] * grid.d), indexing="ij"))


@dataclass(frozen=True, eq=False)
class Field:
    """Grid function; ``fourier=True`` marks values indexed by frequency."""

    grid: GridSpec
    values: np.ndarray
    fourier: bool = field(default=False)

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.shape != self.grid.shape:
            if values.size != self.grid.size:
                raise DimensionMismatch(f"{values.shape} does not fit grid {self.grid.shape}")
            values = values.reshape(self.grid.shape)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def weight(self) -> float:
        step = np.pi / self.grid.L if self.fourier else self.grid.h
        return step ** (self.grid.d / 2)

    def norm(self) -> float:
        return float(self.weight * np.linalg.norm(self.values.ravel()))

    def inner(self, other: Field) -> complex:
        return complex(self.weight**2 * np.vdot(self.values.ravel(), other.values.ravel()))

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> Field:
        """Sample ``func(x_1, ..., x_d)`` on the grid."""
        coords = [grid.coordinate(j) for j in range(1, grid.d + 1)]
        return cls(grid, np.broadcast_to(func(*coords), grid.shape))


def _phase(grid: GridSpec) -> np.ndarray:
    # e^{-i xi_k x_0} with x_0 = -L, i.e. (-1)^k
    k = np.arange(-grid.n // 2, grid.n // 2)
    return np.where(k % 2 == 0, 1.0, -1.0)


def _prefactor(grid: GridSpec) -> float:
    return (grid.h / np.sqrt(2 * np.pi)) ** grid.d


def forward_values(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """Transform along the first ``d`` axes of ``values`` (trailing axes batch)."""
    axes = tuple(range(grid.d))
    out = np.fft.fftshift(np.fft.fftn(values, axes=axes), axes=axes)
    ph = _phase(grid)
    for a in axes:
        shape = [1] * out.ndim
        shape[a] = grid.n
        out = out * ph.reshape(shape)
    return out * _prefactor(grid)


def inverse_values(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    axes = tuple(range(grid.d))
    ph = _phase(grid)
    out = values
    for a in axes:
        shape = [1] * out.ndim
        shape[a] = grid.n
        out = out * ph.reshape(shape)
    out = np.fft.ifftn(np.fft.ifftshift(out, axes=axes), axes=axes)
    return out / _prefactor(grid)


def transform(u: Field) -> Field:
    """Discrete counterpart of ``(2 pi)^{-d/2} \\int e^{-i x.xi} u(x) dx``."""
    if u.fourier:
        raise ValidationError("field is already in frequency space")
    return Field(u.grid, forward_values(u.grid, u.values), fourier=True)


def inverse_transform(u_hat: Field) -> Field:
    if not u_hat.fourier:
        raise ValidationError("field is not in frequency space")
    return Field(u_hat.grid, inverse_values(u_hat.grid, u_hat.values))
