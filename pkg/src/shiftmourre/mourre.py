"""Positive-commutator estimates on energy windows inside ``(0, (pi/beta)^2 / 2)``.

The free commutator ``[H0, iA]`` is the Fourier multiplier
``sum_j sin(beta xi_j) xi_j / beta``.  It is positive for
``0 < |xi| < pi/beta``, which fixes the window ``I``.  For a full
Hamiltonian ``H = H0 + V`` the commutator is compressed to the spectral
subspace of ``H`` on ``[a, b]``.  The number ``k`` of compressed
eigenvalues below ``c`` serves as a finite-rank proxy.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import EmptyWindow, ResolutionTooCoarse, ValidationError, WindowOutsideI
from .grid import GridSpec, frequency_mesh
from .operators import (
    DEFAULT_DENSE_CAP,
    OperatorHandle,
    a_op,
    free_commutator_op,
    h0_op,
    hamiltonian,
)

__all__ = [
    "EnergyWindow",
    "commutator_symbol",
    "double_commutator_symbol",
    "delta_free",
    "CutoffFunction",
    "cutoff_f",
    "FreeMourreResult",
    "free_mourre_check",
    "LScanRow",
    "MourreReport",
    "projected_mourre",
    "l_scan",
    "MIN_PLATEAU_POINTS",
]

MIN_PLATEAU_POINTS = 100


@dataclass(frozen=True)
class EnergyWindow:
    """Closed energy window ``[a, b]`` with cutoff margin ``eta``.

    ``eta`` defaults to half the distance to the nearer edge of ``I`` (in
    energy at the bottom, in momentum at the top), so the cutoff plateau
    always contains ``[a, b]``.
    """

    a: float
    b: float
    beta: float = 1.0
    eta: float | None = None

    def __post_init__(self):
        a, b, beta = float(self.a), float(self.b), float(self.beta)
        if not beta > 0:
            raise ValidationError("beta must be positive")
        top = 0.5 * (math.pi / beta) ** 2
        if not 0 < a < b < top:
            raise WindowOutsideI(f"[{a}, {b}] is not inside (0, {top:.6g})")
        eta = self.eta
        if eta is None:
            eta = 0.5 * min(a, math.pi / beta - math.sqrt(2 * b))
        eta = float(eta)
        if not eta > 0 or a < eta or b > 0.5 * (math.pi / beta - eta) ** 2:
            raise WindowOutsideI(f"eta={eta} leaves [{a}, {b}] off the cutoff plateau")
        object.__setattr__(self, "eta", eta)

    @property
    def top(self) -> float:
        return 0.5 * (math.pi / self.beta) ** 2

    def contains(self, energies: np.ndarray) -> np.ndarray:
        """Closed membership with tolerance ``1e-9 (b - a)`` at the ends."""
        tol = 1e-9 * (self.b - self.a)
        return (energies >= self.a - tol) & (energies <= self.b + tol)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "eta": self.eta, "beta": self.beta}


def _as_xi(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return xi[..., None] if xi.ndim == 0 else xi


def commutator_symbol(xi, beta: float) -> np.ndarray:
    """``sum_j sin(beta xi_j) xi_j / beta``; the last axis of ``xi`` indexes j."""
    xi = _as_xi(xi)
    return np.sum(np.sin(beta * xi) * xi, axis=-1) / beta


def double_commutator_symbol(xi, beta: float) -> np.ndarray:
    """``beta^-2 sum_j sin(beta xi_j) (beta cos(beta xi_j) xi_j + sin(beta xi_j))``."""
    xi = _as_xi(xi)
    s = np.sin(beta * xi)
    return np.sum(s * (beta * np.cos(beta * xi) * xi + s), axis=-1) / beta**2


def _directions(d: int, count: int) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    # Fibonacci lattice on the sphere plus the six axis directions
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    theta = np.pi * (1 + 5**0.5) * i
    pts = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=-1)
    return np.concatenate([pts, np.eye(3), -np.eye(3)])


def _angles_to_direction(d: int, angles) -> np.ndarray:
    if d == 2:
        return np.array([np.cos(angles[0]), np.sin(angles[0])])
    t, p = angles
    return np.array([np.cos(t) * np.sin(p), np.sin(t) * np.sin(p), np.cos(p)])


def _direction_to_angles(u: np.ndarray) -> list[float]:
    if u.size == 2:
        return [math.atan2(u[1], u[0])]
    return [math.atan2(u[1], u[0]), math.acos(max(-1.0, min(1.0, u[2])))]


def delta_free(window: EnergyWindow, d: int = 1, *, n_radii: int = 1000,
               n_directions: int = 10000) -> float:
    """Minimum of the free commutator symbol on ``sqrt(2a) <= |xi| <= sqrt(2b)``.

    Dense sampling over radii and directions, then bounded golden-section
    (Brent) refinement in the radius and each angle around the best sample.
    """
    beta = window.beta
    radii = np.linspace(math.sqrt(2 * window.a), math.sqrt(2 * window.b), n_radii)
    dirs = _directions(d, n_directions)
    best, best_r, best_u = np.inf, radii[0], dirs[0]
    for chunk in np.array_split(radii, max(1, n_radii // 50)):
        xi = chunk[:, None, None] * dirs[None, :, :]
        vals = commutator_symbol(xi, beta)
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        if vals[idx] < best:
            best, best_r, best_u = float(vals[idx]), chunk[idx[0]], dirs[idx[1]]

    lo, hi = radii[0], radii[-1]
    r, u = float(best_r), best_u
    for _ in range(3):
        res = minimize_scalar(lambda s: commutator_symbol(s * u, beta), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        if res.fun < best:
            best, r = float(res.fun), float(res.x)
        if d == 1:
            break
        angles = _direction_to_angles(u)
        step = 2 * np.pi / n_directions ** (1 / (d - 1))
        for i in range(len(angles)):
            def along(t, i=i):
                trial = list(angles)
                trial[i] = t
                return commutator_symbol(r * _angles_to_direction(d, trial), beta)

            res = minimize_scalar(along, bounds=(angles[i] - step, angles[i] + step),
                                  method="bounded", options={"xatol": 1e-12})
            if res.fun < best:
                best = float(res.fun)
                angles[i] = float(res.x)
        u = _angles_to_direction(d, angles)
    return best


@dataclass(frozen=True)
class CutoffFunction:
    """Smooth ``f`` equal to 1 on ``plateau`` and 0 outside ``support``."""

    plateau: tuple[float, float]
    support: tuple[float, float]

    @staticmethod
    def _step(t):
        # exp(-1/t) transition from 0 (t <= 0) to 1 (t >= 1)
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            left = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
            right = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
        return left / (left + right)

    def __call__(self, t):
        (p0, p1), (s0, s1) = self.plateau, self.support
        t = np.asarray(t, dtype=float)
        up = self._step((t - s0) / (p0 - s0))
        down = self._step((s1 - t) / (s1 - p1))
        return up * down


def cutoff_f(window: EnergyWindow) -> CutoffFunction:
    """Cutoff with plateau ``[eta, (pi/beta - eta)^2/2]``.

    Its support is ``[eta/2, (pi/beta - eta/2)^2/2]``.
    """
    k = math.pi / window.beta
    eta = window.eta
    return CutoffFunction((eta, 0.5 * (k - eta) ** 2), (eta / 2, 0.5 * (k - eta / 2) ** 2))


@dataclass(frozen=True)
class FreeMourreResult:
    """Outcome of the pointwise free estimate on a grid.

    ``delta`` is :func:`delta_free`; ``margin`` is the smallest
    ``symbol - delta`` over grid frequencies with energy in ``[a, b]``.
    ``delta_grid`` is the smallest symbol value among those frequencies.
    ``delta_support`` is the smallest symbol value on the whole support of
    :func:`cutoff_f`, the constant that cutoff alone would certify.
    """

    delta: float
    margin: float
    delta_grid: float
    plateau_points: int
    delta_support: float

    def to_dict(self) -> dict:
        return asdict(self)


def free_mourre_check(grid: GridSpec, window: EnergyWindow, *,
                      min_points: int = MIN_PLATEAU_POINTS) -> FreeMourreResult:
    """Check ``1_J(H0) [H0, iA] 1_J(H0) >= delta 1_J(H0)`` frequency by frequency.

    Raises
    ------
    ResolutionTooCoarse
        If fewer than ``min_points`` grid frequencies have energy in ``[a, b]``.
    """
    if not np.isclose(grid.beta, window.beta, rtol=1e-12):
        raise ValidationError(f"window beta {window.beta} differs from grid beta {grid.beta}")
    xi = np.stack(frequency_mesh(grid), axis=-1)
    energy = 0.5 * np.sum(xi**2, axis=-1)
    sym = commutator_symbol(xi, grid.beta)
    inside = window.contains(energy)
    count = int(np.count_nonzero(inside))
    if count < min_points:
        raise ResolutionTooCoarse(
            f"only {count} grid frequencies have energy in [{window.a}, {window.b}] "
            f"(need {min_points}); increase L"
        )
    delta = delta_free(window, grid.d)
    on_support = cutoff_f(window)(energy) > 0
    return FreeMourreResult(
        delta=delta,
        margin=float(np.min(sym[inside] - delta)),
        delta_grid=float(np.min(sym[inside])),
        plateau_points=count,
        delta_support=float(np.min(sym[on_support])),
    )


@dataclass(frozen=True)
class LScanRow:
    L: float
    k: int
    c: float


@dataclass
class MourreReport:
    window: EnergyWindow
    delta_free: float
    c: float
    k: int
    spectrum: np.ndarray
    l_scan: list[LScanRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "window": self.window.to_dict(),
            "delta_free": self.delta_free,
            "c": self.c,
            "k": self.k,
            "spectrum": [float(v) for v in self.spectrum],
            "l_scan": [asdict(r) for r in self.l_scan],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _dense_commutator(H: OperatorHandle, A: OperatorHandle, mode: str, cap: int) -> np.ndarray:
    """Dense ``[H, iA]``.

    ``mode="analytic"`` uses the free multiplier for ``[H0, iA]`` and the
    exact matrix ``i[H - H0, A]`` for the rest.  ``mode="matrix"`` uses
    ``i[H, A]`` of the built matrices throughout.  On a periodic box that
    matrix has zero trace on every spectral subspace of ``H``.
    """
    hd, ad = H.dense(cap), A.dense(cap)
    if mode == "matrix":
        return 1j * (hd @ ad - ad @ hd)
    if mode != "analytic":
        raise ValidationError(f"unknown commutator mode {mode!r}")
    grid = H.grid
    free = free_commutator_op(grid).dense(cap)
    v = hd - h0_op(grid).dense(cap)
    return free + 1j * (v @ ad - ad @ v)


def projected_mourre(H: OperatorHandle, A: OperatorHandle, window: EnergyWindow,
                     c_fraction: float = 0.5, *, commutator: str = "analytic",
                     cap: int = DEFAULT_DENSE_CAP, delta: float | None = None) -> MourreReport:
    """Spectrum of ``E_J [H, iA] E_J`` on ``ran E_J``, ``J = [a, b]``.

    ``c = c_fraction * delta_free`` and ``k`` counts compressed eigenvalues
    below ``c``.  The L-scan holds the single row for this grid; see
    :func:`l_scan` for volume growth.

    Raises
    ------
    TooLargeForDense
        Beyond ``cap`` rows.
    EmptyWindow
        When ``H`` has no eigenvalue in ``[a, b]``.
    """
    if not 0 < c_fraction <= 1:
        raise ValidationError("c_fraction must lie in (0, 1]")
    grid = H.grid
    hd = H.dense(cap)
    w, U = np.linalg.eigh(hd.real if not np.any(hd.imag) else hd)
    sel = window.contains(w)
    if not np.any(sel):
        raise EmptyWindow(f"no eigenvalue of H in [{window.a}, {window.b}]")
    UJ = U[:, sel]
    C = _dense_commutator(H, A, commutator, cap)
    compressed = UJ.conj().T @ C @ UJ
    compressed = 0.5 * (compressed + compressed.conj().T)
    spectrum = np.linalg.eigvalsh(compressed)
    if delta is None:
        delta = delta_free(window, grid.d)
    c = c_fraction * delta
    k = int(np.count_nonzero(spectrum < c))
    return MourreReport(window, delta, c, k, spectrum, [LScanRow(grid.L, k, c)])


def l_scan(potential, grid: GridSpec, window: EnergyWindow, L_values, c_fraction: float = 0.5,
           *, jobs: int = 1, cap: int = DEFAULT_DENSE_CAP, commutator: str = "analytic") -> MourreReport:
    """Projected estimates at each box size in ``L_values`` with the spacing of ``grid``.

    ``potential`` is a potential spec (rebuilt per box) or None for the free
    case.  The returned report carries the spectrum of the largest box and
    one scan row per size, sorted by ``L``.
    """
    from .potentials import build_potential

    delta = delta_free(window, grid.d)
    sizes = sorted(float(L) for L in L_values)

    def run(L):
        g = grid.with_L(L)
        V = None if potential is None else build_potential(potential, g)
        return projected_mourre(hamiltonian(g, V), a_op(g), window, c_fraction,
                                commutator=commutator, cap=cap, delta=delta)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run, sizes))
    else:
        reports = [run(L) for L in sizes]
    last = reports[-1]
    rows = [r.l_scan[0] for r in reports]
    return MourreReport(window, delta, last.c, last.k, last.spectrum, rows)
