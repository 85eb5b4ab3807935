"""Binary and CSV containers for fields and dense matrices.

Binary layout (all little-endian): ``d`` int64, ``L`` float64, ``n`` int64,
``beta`` float64, then interleaved ``re, im`` float64 pairs in row-major
order.  A field carries ``n**d`` pairs, a dense operator ``(n**d)**2``.
"""

from __future__ import annotations

import csv
import io
import itertools
import struct
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .grid import Field, GridSpec, make_grid

__all__ = [
    "write_field",
    "read_field",
    "write_matrix",
    "read_matrix",
    "read_container",
    "field_to_csv",
    "field_from_csv",
]

_HEADER = struct.Struct("<qdqd")


def _pack(grid: GridSpec, data: np.ndarray) -> bytes:
    payload = np.empty(data.size * 2, dtype="<f8")
    flat = np.asarray(data, dtype=complex).ravel()
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    return _HEADER.pack(grid.d, grid.L, grid.n, grid.beta) + payload.tobytes()


def read_container(path) -> tuple[GridSpec, np.ndarray]:
    """Return the grid and the flat complex payload of a container file."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValidationError(f"{path}: truncated header")
    d, L, n, beta = _HEADER.unpack_from(raw)
    grid = make_grid(d, L, n, beta)
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size % 2:
        raise ValidationError(f"{path}: odd payload length")
    return grid, body[0::2] + 1j * body[1::2]


def write_field(path, u: Field) -> None:
    Path(path).write_bytes(_pack(u.grid, u.values))


def read_field(path) -> Field:
    grid, data = read_container(path)
    if data.size != grid.size:
        raise ValidationError(f"{path}: payload has {data.size} values, field needs {grid.size}")
    return Field(grid, data.reshape(grid.shape))


def write_matrix(path, grid: GridSpec, matrix: np.ndarray) -> None:
    if matrix.shape != (grid.size, grid.size):
        raise ValidationError(f"matrix shape {matrix.shape} does not match grid size {grid.size}")
    Path(path).write_bytes(_pack(grid, matrix))


def read_matrix(path) -> tuple[GridSpec, np.ndarray]:
    grid, data = read_container(path)
    if data.size != grid.size**2:
        raise ValidationError(f"{path}: payload is not a square operator on the grid")
    return grid, data.reshape(grid.size, grid.size)


def field_to_csv(u: Field) -> str:
    """CSV text with columns ``i1..id, re, im`` (row-major order)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = u.grid.d
    w.writerow([f"i{j}" for j in range(1, d + 1)] + ["re", "im"])
    for idx in itertools.product(range(u.grid.n), repeat=d):
        z = complex(u.values[idx])
        w.writerow([*idx, repr(z.real), repr(z.imag)])
    return buf.getvalue()


def field_from_csv(text: str, grid: GridSpec) -> Field:
    rows = list(csv.reader(io.StringIO(text)))
    values = np.zeros(grid.shape, dtype=complex)
    for row in rows[1:]:
        idx = tuple(int(v) for v in row[: grid.d])
        values[idx] = float(row[grid.d]) + 1j * float(row[grid.d + 1])
    return Field(grid, values)
