import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftmourre.errors import NearSpectrumSingular, ValidationError
from shiftmourre.grid import Field, make_grid
from shiftmourre.lap import (
    CSV_HEADER,
    ResolventProbe,
    c2_regularity_check,
    classify,
    eps_floor,
    eps_sweep,
    free_green_1d,
    holder_scan,
    resolvent_apply,
    weighted_resolvent_norm,
)
from shiftmourre.operators import a_op, hamiltonian
from shiftmourre.potentials import Example5, Well, build_potential


@pytest.fixture(scope="module")
def free_small():
    g = make_grid(1, 8.0, 64, 1.0)
    return g, hamiltonian(g)


@pytest.fixture(scope="module")
def probe_pos(free_small):
    return ResolventProbe(free_small[1], 1.0, "position")


def test_resolvent_apply_diagonal_case(free_small):
    g, H = free_small
    rhs = Field(g, np.ones(g.shape))  # the constant mode has energy 0
    z = 0.3 + 0.2j
    u = resolvent_apply(H, z, rhs)
    assert np.allclose(u.values, 1.0 / (0.0 - z))


def test_resolvent_apply_refuses_eigenvalue(free_small):
    g, H = free_small
    with pytest.raises(NearSpectrumSingular):
        resolvent_apply(H, 0.0, Field(g, np.ones(g.shape)))


def test_free_green_branch():
    # (-1/2 d^2 + 1)^{-1} has kernel exp(-sqrt2 |x - y|) / sqrt2
    r = np.linspace(0, 5, 11)
    assert np.allclose(free_green_1d(r, 0.0, -1.0), np.exp(-math.sqrt(2) * r) / math.sqrt(2))
    g = free_green_1d(3.0, 0.0, 1 + 1j)
    assert abs(g) < abs(free_green_1d(0.0, 0.0, 1 + 1j))


def test_discrete_resolvent_matches_free_kernel():
    # L >= 8 pi / Im k; the cusp at x = y needs h = 1/32 to get under 2%
    g = make_grid(1, 56.0, 3584, 1.0)
    H = hamiltonian(g)
    z = 1 + 1j
    j = g.n // 2
    rhs = np.zeros(g.shape)
    rhs[j] = 1.0
    col = resolvent_apply(H, z, Field(g, rhs)).values / g.h
    x = g.axis
    near = np.abs(x - x[j]) <= 3.0
    kernel = free_green_1d(x[near], x[j], z)
    err = np.abs(col[near] - kernel) / np.abs(kernel)
    assert err.max() < 0.02


def test_gamma_zero_norm_is_inverse_distance(free_small):
    g, H = free_small
    with pytest.warns(UserWarning):
        probe = ResolventProbe(H, 0.0)
    lam, eps = 0.37, 0.05
    dist = np.min(np.abs(probe.energies - lam - 1j * eps))
    assert probe.norm(lam, eps) == pytest.approx(1.0 / dist, rel=1e-10)


@given(st.floats(-2.0, 4.0), st.floats(1e-3, 1.0))
def test_eps_bound_and_symmetry(lam, eps):
    g = make_grid(1, 8.0, 64, 1.0)
    probe = _cached_probe(g)
    n = probe.norm(lam, eps)
    assert n * eps <= 1 + 1e-10
    assert n == pytest.approx(probe.norm(lam, -eps), rel=1e-10)


_CACHE = {}


def _cached_probe(g):
    if g not in _CACHE:
        _CACHE[g] = ResolventProbe(hamiltonian(g, build_potential(Example5(), g)), 1.0)
    return _CACHE[g]


def test_norm_decreases_with_gamma(free_small):
    g, H = free_small
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = [weighted_resolvent_norm(H, 0.8, 0.05, gam) for gam in (0.0, 0.5, 1.0, 2.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_conjugate_weight(free_small):
    g, H = free_small
    A = a_op(g)
    n = weighted_resolvent_norm(H, 0.8, 0.05, 1.0, "conjugate", A)
    assert 0 < n <= 1 / 0.05


def test_classify_synthetic():
    eps = np.geomspace(1e-1, 1e-4, 7)
    label, slope, r2, _ = classify(eps, 1 / eps)
    assert label == "diverging(-1.0000)" and slope == pytest.approx(-1) and r2 == pytest.approx(1)
    assert classify(eps, 2 + eps)[0] == "saturating"
    assert classify(eps, eps**-0.3)[0] == "inconclusive"


def test_eps_validation(probe_pos):
    with pytest.raises(ValidationError):
        eps_sweep(probe_pos, 0.5, 1.0, "position", [1e-1, 1e-2, 1e-3])
    with pytest.raises(ValidationError):
        eps_sweep(probe_pos, 0.5, 1.0, "position", [1e-1, 1e-2, 5e-3, 1e-4])


def test_eps_floor():
    assert eps_floor(np.arange(100.0), 50.0) == pytest.approx(3.0)


def test_below_spectrum_saturates(free_small):
    g, H = free_small
    curve = eps_sweep(H, -1.0, 1.0, "position", np.geomspace(1e-1, 1e-4, 7), jobs=2)
    assert curve.classification == "saturating"
    assert curve.saturation_value == pytest.approx(curve.rows[-1][1])
    dist = np.min(np.abs(np.linalg.eigvalsh(H.dense().real) + 1.0))
    assert curve.saturation_value <= 1 / dist


def test_bound_state_diverges():
    g = make_grid(1, 32.0, 256, 1.0)
    H = hamiltonian(g, build_potential(Well(-5.0, 2.0), g))
    probe = ResolventProbe(H, 1.0)
    e0 = probe.energies[0]
    curve = eps_sweep(probe, e0, 1.0, "position", np.geomspace(1e-1, 1e-4, 7))
    assert curve.classification.startswith("diverging")
    assert curve.slope == pytest.approx(-1.0, abs=0.05)


def test_csv_format(probe_pos):
    curve = eps_sweep(probe_pos, 0.5, 1.0, "position", np.geomspace(1.0, 1e-1, 4), floor=0.2)
    lines = curve.to_csv().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5
    lam, eps, gam, weight, norm, label = lines[1].split(",")
    assert weight == "pos" and float(norm) == curve.rows[0][1]
    assert float(eps) == curve.rows[0][0]
    assert not curve.respects_floor
    assert "lambda" not in curve.to_csv(header=False)


class _ConstantProbe(ResolventProbe):
    def __init__(self):
        pass

    def norm(self, lam, eps):
        return 2.5


def test_holder_constant_is_zero():
    assert holder_scan(_ConstantProbe(), np.linspace(1, 2, 9), 1.0, 0.1).max_ratio == 0.0


def test_holder_refinement_free_case():
    # F is smooth at fixed eps, so theta = 1/2 quotients shrink by about 2^-1/2 per halving
    g = make_grid(1, 32.0, 256, 1.0)
    probe = ResolventProbe(hamiltonian(g), 1.0)
    floor = eps_floor(probe.energies, 1.5)
    ratios = [holder_scan(probe, np.linspace(1.2, 1.8, N), 1.0, floor, eigenvalues=probe.energies).max_ratio
              for N in (21, 41, 81)]
    assert all(np.isfinite(ratios)) and ratios[0] > 0
    for coarse, fine in zip(ratios, ratios[1:]):
        assert 0.5 < fine / coarse <= 1.2


def test_holder_excludes_eigenvalues(probe_pos):
    ev = probe_pos.energies
    lams = np.linspace(ev[0] - 0.05, ev[0] + 0.05, 5)
    res = holder_scan(probe_pos, lams, 1.0, 0.05, eigenvalues=ev)
    assert len(res.excluded) == 1 and len(res.ratios) == 3


def test_c2_check(free_small):
    g, _ = free_small
    H = hamiltonian(g, build_potential(Example5(), g))
    rep = c2_regularity_check(H, a_op(g), 1 + 0.5j)
    assert rep.identity_error < 1e-10
    assert rep.literal_sign_error > 0.5
    assert 3.5 < rep.richardson_ratio < 4.5
    assert rep.second_diff_variation < 0.05
    with pytest.raises(ValidationError):
        c2_regularity_check(H, a_op(g), 1.0)
