"""Model potentials and numerical proxies for the decay hypotheses on V.

Four families are available:

* ``Example4``: a sum of three polynomially decaying pieces, one per clause
  of the short-range / C^1 / C^2 decomposition.
* ``Example5``: ``<x>^{-gamma} W(x)`` with ``W`` a finite real Fourier series
  that is ``beta``-periodic on the grid.
* ``Well``: a sampled square well.
* ``Custom``: samples read from the binary field container.

Compactness relative to ``H0`` cannot be decided on a finite grid.
:func:`assumption_report` therefore reports two labelled *proxies*, the
decay of singular values and the stability under volume doubling.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .containers import read_field
from .errors import DimensionMismatch, SupportTouchesBoundary, ValidationError
from .grid import Field, GridSpec, frequency_mesh
from .operators import DEFAULT_DENSE_CAP, fourier_multiplier_op

__all__ = [
    "FourierTerm",
    "Example4",
    "Example5",
    "Well",
    "Custom",
    "PotentialSpec",
    "spec_from_dict",
    "spec_to_dict",
    "build_potential",
    "japanese",
    "difference_fields",
    "AssumptionRow",
    "AssumptionReport",
    "assumption_report",
]


@dataclass(frozen=True)
class FourierTerm:
    """``cos * cos(2 pi k.x / beta) + sin * sin(2 pi k.x / beta)``."""

    k: tuple[int, ...]
    cos: float = 0.0
    sin: float = 0.0


@dataclass(frozen=True)
class Example4:
    """``V1 + V2 + V3`` with closed-form representatives.

    ``V1 = a1 <x>^-g1`` (short range, ``g1 >= 2``),
    ``V2 = a2 <x>^-g2 sin(x_1)`` (oscillating C^1 piece),
    ``V3 = a3 <x>^-g3`` (smooth long range).
    """

    gammas: tuple[float, float, float] = (3.0, 3.0, 0.5)
    amplitudes: tuple[float, float, float] = (1.0, 0.5, 0.5)


@dataclass(frozen=True)
class Example5:
    """Decaying envelope times a ``beta``-periodic profile.

    When ``terms`` is None a random five-term series is drawn from ``seed``
    and scaled to unit sup-norm.  ``gamma = 0`` gives the purely periodic
    control.
    """

    gamma: float = 1.0
    terms: tuple[FourierTerm, ...] | None = None
    amplitude: float = 1.0
    seed: int = 42


@dataclass(frozen=True)
class Well:
    """``depth`` on the ball ``|x| <= width/2``, zero elsewhere."""

    depth: float = -1.0
    width: float = 1.0


@dataclass(frozen=True)
class Custom:
    path: str


PotentialSpec = Example4 | Example5 | Well | Custom

_VARIANTS = {"example4": Example4, "example5": Example5, "well": Well, "custom": Custom}


def spec_to_dict(spec: PotentialSpec) -> dict:
    name = next(k for k, v in _VARIANTS.items() if isinstance(spec, v))
    out = {"variant": name, **asdict(spec)}
    for key in ("gammas", "amplitudes"):
        if key in out:
            out[key] = list(out[key])
    if out.get("terms") is not None:
        out["terms"] = [{"k": list(t["k"]), "cos": t["cos"], "sin": t["sin"]} for t in out["terms"]]
    return out


def spec_from_dict(data: dict) -> PotentialSpec:
    data = dict(data)
    try:
        cls = _VARIANTS[data.pop("variant")]
    except KeyError as exc:
        raise ValidationError(f"unknown or missing potential variant: {exc}") from None
    if cls is Example4:
        for key in ("gammas", "amplitudes"):
            if key in data:
                data[key] = tuple(float(v) for v in data[key])
                if len(data[key]) != 3:
                    raise ValidationError(f"Example4 needs three {key}")
    if cls is Example5 and data.get("terms") is not None:
        data["terms"] = tuple(FourierTerm(tuple(int(k) for k in t["k"]), float(t.get("cos", 0.0)),
                                          float(t.get("sin", 0.0))) for t in data["terms"])
    try:
        return cls(**data)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


def japanese(grid: GridSpec) -> np.ndarray:
    """``<x> = (1 + |x|^2)^{1/2}`` on the grid."""
    return np.sqrt(1.0 + grid.radius() ** 2)


def _random_terms(d: int, seed: int, count: int = 5) -> tuple[FourierTerm, ...]:
    rng = np.random.default_rng(seed)
    terms = []
    while len(terms) < count:
        k = tuple(int(v) for v in rng.integers(-2, 3, size=d))
        if any(k):
            a, b = rng.normal(size=2)
            terms.append(FourierTerm(k, float(a), float(b)))
    return tuple(terms)


def _periodic_cell(grid: GridSpec, terms) -> np.ndarray:
    """Profile sampled on one cell of ``m**d`` points (offsets from ``-L``)."""
    x = -grid.L + grid.h * np.arange(grid.m)
    mesh = np.meshgrid(*([x] * grid.d), indexing="ij")
    out = np.zeros((grid.m,) * grid.d)
    for t in terms:
        if len(t.k) != grid.d:
            raise DimensionMismatch(f"wave vector {t.k} on a {grid.d}-d grid")
        phase = 2 * np.pi / grid.beta * sum(k * xj for k, xj in zip(t.k, mesh))
        out += t.cos * np.cos(phase) + t.sin * np.sin(phase)
    return out


def periodic_profile(spec: Example5, grid: GridSpec) -> np.ndarray:
    """``W`` tiled from one cell, so cell-to-cell samples are byte-identical."""
    if grid.n % grid.m:
        raise ValidationError(f"periodic profiles need m | n (m={grid.m}, n={grid.n})")
    terms = spec.terms
    cell = _periodic_cell(grid, terms if terms is not None else _random_terms(grid.d, spec.seed))
    if terms is None:
        cell = cell / np.max(np.abs(cell))
    return np.tile(cell, (grid.n // grid.m,) * grid.d)


def _check_support(grid: GridSpec, values: np.ndarray, what: str) -> None:
    sup = np.max(np.abs(values), initial=0.0)
    outside = np.max(np.abs(values[~grid.interior_mask()]), initial=0.0)
    if sup > 0 and outside > 1e-3 * sup:
        warnings.warn(f"{what} reaches the boundary layer (|V| up to {outside:.3g} there)",
                      SupportTouchesBoundary, stacklevel=3)


def build_potential(spec: PotentialSpec, grid: GridSpec) -> Field:
    """Sample ``spec`` on ``grid`` as a real :class:`Field`."""
    if isinstance(spec, Example5):
        values = spec.amplitude * japanese(grid) ** (-spec.gamma) * periodic_profile(spec, grid)
    elif isinstance(spec, Example4):
        (g1, g2, g3), (a1, a2, a3) = spec.gammas, spec.amplitudes
        jx = japanese(grid)
        values = a1 * jx**-g1 + a2 * jx**-g2 * np.sin(grid.coordinate(1)) + a3 * jx**-g3
    elif isinstance(spec, Well):
        if spec.width <= 0:
            raise ValidationError("well width must be positive")
        values = np.where(grid.radius() <= spec.width / 2, float(spec.depth), 0.0)
        _check_support(grid, values, "well")
    elif isinstance(spec, Custom):
        u = read_field(spec.path)
        if u.grid != grid:
            raise DimensionMismatch(f"{spec.path} was sampled on a different grid")
        values = np.asarray(u.values)
        if np.iscomplexobj(values):
            if np.max(np.abs(values.imag), initial=0.0) > 1e-14:
                raise ValidationError("custom potential is not real")
            values = values.real
        _check_support(grid, values, Path(spec.path).name)
    else:
        raise ValidationError(f"not a potential spec: {spec!r}")
    return Field(grid, np.asarray(values, dtype=float))


# difference fields ------------------------------------------------------------


def _diff(values: np.ndarray, grid: GridSpec, j: int) -> np.ndarray:
    return (np.roll(values, -grid.m, axis=j - 1) - values) / grid.beta


def difference_fields(V: Field, beta: float | None = None) -> dict[str, Field]:
    """``x_j D_j V`` and ``x_j x_k D_j D_k V`` (``j <= k``) by index shifts.

    Keys use the expression grammar, e.g. ``"x1*D1(V)"`` and
    ``"x1*x2*D1(D2(V))"``.  Values next to the periodic seam are not
    meaningful; mask them with ``grid.interior_mask()``.
    """
    grid = V.grid
    if beta is not None and not np.isclose(beta, grid.beta, rtol=1e-12):
        raise ValidationError(f"beta={beta} differs from the grid's beta={grid.beta}")
    v = np.asarray(V.values)
    first = {j: _diff(v, grid, j) for j in range(1, grid.d + 1)}
    out = {}
    for j in range(1, grid.d + 1):
        out[f"x{j}*D{j}(V)"] = Field(grid, grid.coordinate(j) * first[j])
    for j in range(1, grid.d + 1):
        for k in range(j, grid.d + 1):
            dd = _diff(first[k], grid, j)
            out[f"x{j}*x{k}*D{j}(D{k}(V))"] = Field(grid, grid.coordinate(j) * grid.coordinate(k) * dd)
    return out


# assumption report ------------------------------------------------------------


@dataclass
class AssumptionRow:
    name: str
    sup: float
    decay_exponent: float
    decay_r2: float
    sigma_max: float
    sigma_max_doubled: float
    sv_exponent: float
    sv_r2: float
    compact_proxy: bool
    bounded_proxy: bool


@dataclass
class AssumptionReport:
    """Per-coefficient proxy rows; both proxies are heuristics, not proofs."""

    grid: dict
    rows: list[AssumptionRow] = field(default_factory=list)

    def row(self, name: str) -> AssumptionRow:
        return next(r for r in self.rows if r.name == name)

    def to_dict(self) -> dict:
        return {"grid": self.grid, "proxy_note": "numerical proxies, not compactness proofs",
                "rows": [asdict(r) for r in self.rows]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and R^2 of ``log y`` against ``log x``."""
    lx, ly = np.log(x), np.log(y)
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    ss = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(r2)


def _decay_fit(values: np.ndarray, grid: GridSpec) -> tuple[float, float]:
    """Decay exponent ``p`` in ``max_cell |M| ~ <x>^-p`` over interior cells.

    Taking the maximum over each ``beta``-cell removes periodic oscillation.
    Tails that vanish identically count as infinitely fast decay.
    """
    m = grid.m
    cells = grid.n // m
    absv = np.abs(values)[(slice(0, cells * m),) * grid.d]
    blocks = absv.reshape(sum(((cells, m) for _ in range(grid.d)), ()))
    cmax = blocks.max(axis=tuple(range(1, 2 * grid.d, 2)))
    centers = -grid.L + grid.h * (m * np.arange(cells) + (m - 1) / 2)
    mesh = np.meshgrid(*([centers] * grid.d), indexing="ij")
    jx = np.sqrt(1.0 + sum(c**2 for c in mesh))
    inner = np.ones(cmax.shape, dtype=bool)
    for c in mesh:
        inner &= np.abs(c) + m * grid.h <= grid.L - 4 * grid.beta
    sup = absv.max(initial=0.0)
    tail = inner & (jx >= 2.0)
    if sup == 0 or not np.any(cmax[tail] > 1e-14 * sup):
        return float("inf"), 1.0
    keep = tail & (cmax > 1e-14 * sup)
    if np.count_nonzero(keep) < 3:
        return float("inf"), 1.0
    slope, r2 = _loglog_fit(jx[keep], cmax[keep])
    return -slope, r2


def _free_resolvent_dense(grid: GridSpec, cap: int) -> np.ndarray:
    """``(H0 + 1)^{-1}`` as a real symmetric matrix."""
    xi2 = sum(x**2 for x in frequency_mesh(grid))
    r = fourier_multiplier_op(grid, 1.0 / (1.0 + 0.5 * xi2), "(H0+1)^-1", self_adjoint=True)
    return r.dense(cap).real


def _singular_values(values: np.ndarray, resolvent: np.ndarray) -> np.ndarray:
    """Singular values of ``M (H0+1)^{-1}`` in descending order."""
    b = values.ravel()[:, None] * resolvent
    ev = np.linalg.eigvalsh(b.T @ b)
    return np.sqrt(np.clip(ev[::-1], 0.0, None))


def _band_count(grid: GridSpec, energy: float) -> int:
    xi2 = sum(x**2 for x in frequency_mesh(grid))
    return int(np.count_nonzero(0.5 * xi2 <= energy))


def _zero_extend(values: np.ndarray, grid: GridSpec, big: GridSpec) -> np.ndarray:
    out = np.zeros(big.shape)
    off = (big.n - grid.n) // 2
    out[(slice(off, off + grid.n),) * grid.d] = values
    return out


def assumption_report(V: Field | PotentialSpec, grid: GridSpec, *, cap: int = DEFAULT_DENSE_CAP,
                      band_energy: float | None = None) -> AssumptionReport:
    """Decay, relative-bound and compactness proxies for ``V`` and its differences.

    Parameters
    ----------
    V
        Sampled potential, or a spec that is rebuilt on the doubled box.
        A sampled potential is extended by zero for the doubling check.
    band_energy
        Singular values are ranked within the ``|xi|^2/2 <= band_energy``
        count; defaults to the top of the positive-commutator window.

    Notes
    -----
    The compact proxy holds when the decay exponent is positive and the
    leading singular values follow a power law with exponent below -0.2
    and R^2 >= 0.9.  The bounded proxy holds when ``sigma_max`` stays within
    10% under ``L -> 2L`` at fixed spacing.  Identically zero rows pass both.
    """
    if isinstance(V, Field):
        if V.grid != grid:
            raise DimensionMismatch("potential lives on a different grid")
        field_v, spec = V, None
    else:
        spec = V
        field_v = build_potential(spec, grid)
    big = grid.with_L(2 * grid.L)
    field_big = build_potential(spec, big) if spec is not None else \
        Field(big, _zero_extend(np.asarray(field_v.values).real, grid, big))

    energy = grid.window_top if band_energy is None else band_energy
    k_max = max(_band_count(grid, energy), 3)
    res, res_big = _free_resolvent_dense(grid, cap), _free_resolvent_dense(big, cap)
    interior, interior_big = grid.interior_mask(), big.interior_mask()

    def entries(u: Field):
        return {"V": u, **difference_fields(u)}

    report = AssumptionReport({"d": grid.d, "L": grid.L, "n": grid.n, "beta": grid.beta})
    small, doubled = entries(field_v), entries(field_big)
    for name, u in small.items():
        vals = np.where(interior, np.asarray(u.values).real, 0.0)
        vals_big = np.where(interior_big, np.asarray(doubled[name].values).real, 0.0)
        sup = float(np.max(np.abs(vals), initial=0.0))
        if sup == 0.0:
            report.rows.append(AssumptionRow(name, 0.0, float("inf"), 1.0, 0.0, 0.0,
                                             float("-inf"), 1.0, True, True))
            continue
        decay, decay_r2 = _decay_fit(vals, grid)
        sv = _singular_values(vals, res)
        sv_big = _singular_values(vals_big, res_big)
        lead = sv[:k_max]
        keep = lead > 1e-14 * sv[0]
        if np.count_nonzero(keep) >= 3:
            ranks = np.arange(1, lead.size + 1)
            sv_exp, sv_r2 = _loglog_fit(ranks[keep], lead[keep])
        else:
            sv_exp, sv_r2 = float("-inf"), 1.0
        sig, sig_big = float(sv[0]), float(sv_big[0])
        compact = bool(decay > 0 and sv_exp < -0.2 and sv_r2 >= 0.9)
        bounded = bool(np.isfinite(sig) and abs(sig_big - sig) <= 0.1 * sig)
        report.rows.append(AssumptionRow(name, sup, decay, decay_r2, sig, sig_big,
                                         sv_exp, sv_r2, compact, bounded))
    return report
