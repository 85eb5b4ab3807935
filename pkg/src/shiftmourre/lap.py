"""Numerical probes of boundary values of weighted resolvents.

Everything here is dense linear algebra on a finite periodic grid.  On
such a grid the resolvent norm eventually blows up like ``1/eps`` at every
eigenvalue, so sweeps are only meaningful above an ``eps`` floor tied to
the local level spacing (:func:`eps_floor`).
"""

from __future__ import annotations

import io
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from .errors import NearSpectrumSingular, ValidationError
from .grid import Field
from .operators import DEFAULT_DENSE_CAP, OperatorHandle, weight_op

__all__ = [
    "resolvent_apply",
    "free_green_1d",
    "ResolventProbe",
    "weighted_resolvent_norm",
    "eps_floor",
    "LapCurve",
    "eps_sweep",
    "classify",
    "HolderResult",
    "holder_scan",
    "C2Report",
    "c2_regularity_check",
    "CSV_HEADER",
]

CSV_HEADER = "lambda,eps,gamma,weight,norm,classification"
_WEIGHT_TAGS = {"position": "pos", "pos": "pos", "conjugate": "conj", "conj": "conj"}


def _dense_h(H: OperatorHandle, cap: int) -> np.ndarray:
    hd = H.dense(cap)
    return hd.real if not np.any(hd.imag) else hd


def resolvent_apply(H: OperatorHandle, z: complex, rhs: Field, *, cap: int = DEFAULT_DENSE_CAP) -> Field:
    """Solve ``(H - z) u = rhs`` by dense LU with a residual check.

    Raises
    ------
    NearSpectrumSingular
        If ``z`` is real and within ``1e-8`` of the spectrum, or the relative
        residual exceeds ``1e-10``.
    """
    z = complex(z)
    hd = _dense_h(H, cap)
    if z.imag == 0:
        dist = np.min(np.abs(np.linalg.eigvalsh(hd) - z.real))
        if dist <= 1e-8:
            raise NearSpectrumSingular(f"z={z.real} is within {dist:.2e} of the spectrum")
    M = hd - z * np.eye(hd.shape[0])
    b = rhs.flat().astype(complex)
    u = scipy.linalg.solve(M, b)
    resid = np.linalg.norm(M @ u - b)
    if resid > 1e-10 * max(np.linalg.norm(b), np.finfo(float).tiny):
        raise NearSpectrumSingular(f"relative residual {resid / np.linalg.norm(b):.2e}")
    return Field(rhs.grid, u)


def free_green_1d(x, y, z: complex) -> np.ndarray:
    """Kernel of ``(-1/2 d^2/dx^2 - z)^{-1}`` on the line.

    ``G(x, y) = (i/k) exp(ik|x - y|)`` with ``k = sqrt(2z)``, ``Im k > 0``.
    """
    k = np.sqrt(2 * complex(z))
    if k.imag < 0:
        k = -k
    return 1j / k * np.exp(1j * k * np.abs(np.asarray(x) - np.asarray(y)))


class ResolventProbe:
    """Weighted resolvent norms of a fixed ``H`` with one eigendecomposition.

    ``norm(lam, eps)`` is ``|W (H - lam - i eps)^{-1} W|_2`` with ``W`` the
    position weight ``<x>^-gamma`` or the conjugate weight ``<A>^-gamma``.
    """

    def __init__(self, H: OperatorHandle, gamma: float, weight_kind: str = "position",
                 A: OperatorHandle | None = None, *, cap: int = DEFAULT_DENSE_CAP):
        if weight_kind not in _WEIGHT_TAGS:
            raise ValidationError(f"unknown weight kind {weight_kind!r}")
        if gamma <= 0.5:
            warnings.warn(f"gamma={gamma} <= 1/2: boundary values are not expected to exist",
                          stacklevel=2)
        self.grid = H.grid
        self.gamma = float(gamma)
        self.weight = _WEIGHT_TAGS[weight_kind]
        self.energies, U = np.linalg.eigh(_dense_h(H, cap))
        W = weight_op(H.grid, weight_kind, gamma, A, cap).dense(cap)
        W = W.real if not np.any(W.imag) else W
        self._WU = W @ U

    def resolvent_weights(self, lam: float, eps: float) -> np.ndarray:
        return 1.0 / (self.energies - lam - 1j * eps)

    def norm(self, lam: float, eps: float) -> float:
        if eps == 0:
            raise ValidationError("eps must be nonzero")
        M = (self._WU * self.resolvent_weights(lam, eps)) @ self._WU.conj().T
        return float(np.linalg.norm(M, 2))


def weighted_resolvent_norm(H: OperatorHandle, lam: float, eps: float, gamma: float,
                            weight_kind: str = "position", A: OperatorHandle | None = None,
                            *, cap: int = DEFAULT_DENSE_CAP) -> float:
    """Largest singular value of ``W (H - lam - i eps)^{-1} W``."""
    return ResolventProbe(H, gamma, weight_kind, A, cap=cap).norm(lam, eps)


def eps_floor(energies: np.ndarray, lam: float, factor: float = 3.0, levels: int = 10) -> float:
    """``factor`` times the mean spacing of the ``2*levels`` eigenvalues nearest ``lam``."""
    w = np.sort(np.asarray(energies))
    idx = np.argsort(np.abs(w - lam))[: 2 * levels]
    near = np.sort(w[idx])
    if near.size < 2:
        raise ValidationError("need at least two eigenvalues to estimate a spacing")
    return float(factor * (near[-1] - near[0]) / (near.size - 1))


@dataclass
class LapCurve:
    lam: float
    gamma: float
    weight_kind: str
    rows: list[tuple[float, float]]
    classification: str
    slope: float
    r2: float
    last_decade_change: float
    saturation_value: float | None = None
    eps_floor: float | None = None

    @property
    def respects_floor(self) -> bool:
        return self.eps_floor is None or min(e for e, _ in self.rows) >= self.eps_floor

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        if header:
            buf.write(CSV_HEADER + "\n")
        for eps, nrm in self.rows:
            buf.write(f"{self.lam:.17g},{eps:.17g},{self.gamma:.17g},{self.weight_kind},"
                      f"{nrm:.17g},{self.classification}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["rows"] = [[e, v] for e, v in self.rows]
        return out


def _loglog(x, y):
    lx, ly = np.log(x), np.log(y)
    slope, icept = np.polyfit(lx, ly, 1)
    ss = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum((ly - slope * lx - icept) ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(r2)


def classify(eps: np.ndarray, norms: np.ndarray) -> tuple[str, float, float, float]:
    """Label an ``eps`` sweep; returns ``(label, slope, r2, last_decade_change)``.

    ``saturating`` when the norm changes by less than 5% over the last decade
    of ``eps``.  ``diverging(s)`` when the log-log slope ``s`` is at most
    -0.5 with R^2 >= 0.98.  Anything else is ``inconclusive``.
    """
    order = np.argsort(eps)[::-1]
    eps, norms = np.asarray(eps)[order], np.asarray(norms)[order]
    target = np.log10(eps[-1]) + 1.0
    j = int(np.argmin(np.abs(np.log10(eps) - target)))
    change = abs(norms[-1] - norms[j]) / norms[-1]
    slope, r2 = _loglog(eps, norms)
    if change < 0.05:
        return "saturating", slope, r2, float(change)
    if slope <= -0.5 and r2 >= 0.98:
        return f"diverging({slope:.4f})", slope, r2, float(change)
    return "inconclusive", slope, r2, float(change)


def _check_eps_list(eps_list) -> np.ndarray:
    eps = np.asarray(sorted((float(e) for e in eps_list), reverse=True))
    if eps.size < 4:
        raise ValidationError("an eps sweep needs at least 4 points")
    if np.any(eps <= 0):
        raise ValidationError("eps values must be positive")
    ratios = eps[1:] / eps[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-6):
        raise ValidationError("eps values must form a geometric sequence")
    return eps


def eps_sweep(H: OperatorHandle | ResolventProbe, lam: float, gamma: float, weight_kind: str,
              eps_list, *, A: OperatorHandle | None = None, jobs: int = 1,
              floor: float | None = None, cap: int = DEFAULT_DENSE_CAP) -> LapCurve:
    """Weighted resolvent norms at ``lam + i eps`` for a geometric ``eps_list``.

    ``floor`` is recorded on the curve; pass the value of :func:`eps_floor`
    to make :attr:`LapCurve.respects_floor` meaningful.
    """
    eps = _check_eps_list(eps_list)
    probe = H if isinstance(H, ResolventProbe) else ResolventProbe(H, gamma, weight_kind, A, cap=cap)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            norms = list(pool.map(lambda e: probe.norm(lam, e), eps))
    else:
        norms = [probe.norm(lam, e) for e in eps]
    norms = np.asarray(norms)
    label, slope, r2, change = classify(eps, norms)
    return LapCurve(float(lam), float(gamma), probe.weight, list(zip(eps.tolist(), norms.tolist())),
                    label, slope, r2, change,
                    saturation_value=float(norms[-1]) if label == "saturating" else None,
                    eps_floor=floor)


@dataclass
class HolderResult:
    theta: float
    eps: float
    lambdas: list[float]
    values: list[float]
    ratios: list[float]
    excluded: list[tuple[float, float]] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=0.0)


def holder_scan(H: OperatorHandle | ResolventProbe, lambdas, gamma: float, eps: float,
                theta: float = 0.5, weight_kind: str = "position", *,
                eigenvalues=(), A: OperatorHandle | None = None,
                cap: int = DEFAULT_DENSE_CAP) -> HolderResult:
    """Holder quotients ``|F(l) - F(l')| / |l - l'|^theta`` of ``F(l) = norm(l, eps)``.

    Adjacent pairs whose closed interval contains one of ``eigenvalues`` are
    excluded and listed in ``excluded``.
    """
    lam = np.sort(np.asarray(lambdas, dtype=float))
    probe = H if isinstance(H, ResolventProbe) else ResolventProbe(H, gamma, weight_kind, A, cap=cap)
    values = np.array([probe.norm(x, eps) for x in lam])
    ev = np.asarray(eigenvalues, dtype=float)
    ratios, excluded = [], []
    for i in range(lam.size - 1):
        lo, hi = lam[i], lam[i + 1]
        if np.any((ev >= lo) & (ev <= hi)):
            excluded.append((float(lo), float(hi)))
            continue
        ratios.append(float(abs(values[i + 1] - values[i]) / (hi - lo) ** theta))
    return HolderResult(theta, eps, lam.tolist(), values.tolist(), ratios, excluded)


@dataclass
class C2Report:
    """Finite-difference checks of ``t -> exp(itA) R exp(-itA)`` at ``t = 0``.

    ``identity_error`` compares ``i[A, R]`` with ``R [H, iA] R``;
    ``literal_sign_error`` compares it with ``-R [H, iA] R``.
    """

    z: complex
    identity_error: float
    literal_sign_error: float
    first_diff_errors: dict[float, float]
    richardson_ratio: float
    second_diff_norms: dict[float, float]
    second_diff_variation: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["z"] = [self.z.real, self.z.imag]
        out["first_diff_errors"] = {repr(k): v for k, v in self.first_diff_errors.items()}
        out["second_diff_norms"] = {repr(k): v for k, v in self.second_diff_norms.items()}
        return out


def c2_regularity_check(H: OperatorHandle, A: OperatorHandle, z: complex,
                        t_list=(1e-2, 5e-3), second_t=None, *,
                        cap: int = DEFAULT_DENSE_CAP) -> C2Report:
    """Derivative checks for the conjugated resolvent ``R(t)``.

    All norms are operator 2-norms, computed in the eigenbasis of ``A``
    where ``exp(itA)`` is diagonal.  ``richardson_ratio`` is the ratio of
    first-difference errors at ``t_list[0]`` and ``t_list[1]``; it tends to
    4 when ``t_list[1] = t_list[0]/2``.
    """
    z = complex(z)
    if z.imag == 0:
        raise ValidationError("z must have a nonzero imaginary part")
    if second_t is None:
        second_t = np.geomspace(1e-3, 1e-2, 5)
    hd, ad = H.dense(cap), A.dense(cap)
    a, S = np.linalg.eigh(ad)
    R = np.linalg.inv(hd - z * np.eye(hd.shape[0]))
    Rt = S.conj().T @ R @ S
    gap = a[:, None] - a[None, :]
    derivative = 1j * gap * Rt

    comm = 1j * (hd @ ad - ad @ hd)
    rhs = S.conj().T @ (R @ comm @ R) @ S
    scale = np.linalg.norm(derivative, 2)
    identity_error = float(np.linalg.norm(derivative - rhs, 2) / scale)
    literal_error = float(np.linalg.norm(derivative + rhs, 2) / scale)

    def conj_res(t):
        return np.exp(1j * t * gap) * Rt

    first = {}
    for t in t_list:
        d1 = (conj_res(t) - conj_res(-t)) / (2 * t)
        first[float(t)] = float(np.linalg.norm(d1 - derivative, 2))
    t0, t1 = float(t_list[0]), float(t_list[1])
    ratio = first[t0] / first[t1] if first[t1] > 0 else float("inf")

    second = {}
    for t in second_t:
        d2 = (conj_res(t) - 2 * Rt + conj_res(-t)) / t**2
        second[float(t)] = float(np.linalg.norm(d2, 2))
    vals = np.array(list(second.values()))
    variation = float((vals.max() - vals.min()) / vals.min())
    return C2Report(z, identity_error, literal_error, first, float(ratio), second, variation)
