import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftmourre.containers import write_field
from shiftmourre.errors import DimensionMismatch, SupportTouchesBoundary, ValidationError
from shiftmourre.grid import Field, make_grid
from shiftmourre.operators import hamiltonian
from shiftmourre.potentials import (
    Custom,
    Example4,
    Example5,
    FourierTerm,
    Well,
    assumption_report,
    build_potential,
    difference_fields,
    japanese,
    spec_from_dict,
    spec_to_dict,
)

COS = (FourierTerm((1,), cos=1.0),)


def test_example5_value_at_origin(grid1):
    V = build_potential(Example5(gamma=1.0, terms=COS), grid1)
    assert V.values[grid1.n // 2] == pytest.approx(1.0, abs=1e-15)
    assert np.isrealobj(V.values)


def test_example5_envelope(grid1):
    spec = Example5(gamma=1.5, terms=COS)
    V = build_potential(spec, grid1).values
    x = grid1.axis
    assert np.allclose(V, (1 + x**2) ** -0.75 * np.cos(2 * np.pi * x / grid1.beta), atol=1e-12)


@pytest.mark.parametrize("d", [1, 2])
def test_periodic_profile_is_byte_identical_per_cell(d):
    g = make_grid(d, 4.0, 64 if d == 1 else 32, 1.0)
    W = build_potential(Example5(gamma=0.0), g).values
    m = g.m
    assert np.max(np.abs(W)) == pytest.approx(1.0)
    ref = W[(slice(0, m),) * d]
    for start in range(0, g.n, m):
        idx = (slice(start, start + m),) + (slice(0, m),) * (d - 1)
        assert np.array_equal(W[idx], ref)


def test_example5_shift_covariance(grid1):
    gamma = 2.0
    V = build_potential(Example5(gamma=gamma), grid1).values
    jx = japanese(grid1)
    lhs = np.roll(V * jx**gamma, -grid1.m)
    rows = grid1.interior_mask()
    assert np.allclose(lhs[rows], (V * jx**gamma)[rows], atol=1e-12)


def test_periodic_profile_needs_cell_alignment():
    g = make_grid(1, 4.25, 34, 1.0)
    with pytest.raises(ValidationError):
        build_potential(Example5(), g)


def test_well(grid1):
    V = build_potential(Well(-1.0, 1.0), grid1).values
    inside = np.abs(grid1.axis) <= 0.5
    assert np.array_equal(V, np.where(inside, -1.0, 0.0))
    with pytest.warns(SupportTouchesBoundary):
        build_potential(Well(-1.0, 2 * grid1.L), grid1)


def test_well_binds():
    g = make_grid(1, 16.0, 128, 1.0)
    w = np.linalg.eigvalsh(hamiltonian(g, build_potential(Well(-5.0, 2.0), g)).dense().real)
    assert w[0] < 0


def test_custom(tmp_path, grid1, rng):
    v = rng.normal(size=grid1.shape) * np.exp(-grid1.axis**2)
    write_field(tmp_path / "v.bin", Field(grid1, v))
    V = build_potential(Custom(str(tmp_path / "v.bin")), grid1)
    assert np.array_equal(V.values, v)
    with pytest.raises(DimensionMismatch):
        build_potential(Custom(str(tmp_path / "v.bin")), make_grid(1, 4.0, 64, 1.0))


def test_difference_fields_examples(grid1):
    zero = difference_fields(Field(grid1, np.full(grid1.shape, 3.0)))
    assert all(np.all(f.values == 0) for f in zero.values())
    fields = difference_fields(Field(grid1, grid1.axis))
    rows = grid1.interior_mask()
    assert np.allclose(fields["x1*D1(V)"].values[rows], grid1.axis[rows])
    assert np.allclose(fields["x1*x1*D1(D1(V))"].values[rows], 0.0, atol=1e-12)


def _example4_closed_form(spec, x):
    (g1, g2, g3), (a1, a2, a3) = spec.gammas, spec.amplitudes
    jx = np.sqrt(1 + x**2)
    return a1 * jx**-g1 + a2 * jx**-g2 * np.sin(x) + a3 * jx**-g3


def test_difference_fields_match_closed_form(grid1):
    spec = Example4()
    fields = difference_fields(build_potential(spec, grid1))
    x, b = grid1.axis, grid1.beta
    d1 = (_example4_closed_form(spec, x + b) - _example4_closed_form(spec, x)) / b
    d2 = (_example4_closed_form(spec, x + 2 * b) - 2 * _example4_closed_form(spec, x + b)
          + _example4_closed_form(spec, x)) / b**2
    rows = grid1.interior_mask()
    assert np.allclose(fields["x1*D1(V)"].values[rows], (x * d1)[rows], atol=1e-12, rtol=0)
    assert np.allclose(fields["x1*x1*D1(D1(V))"].values[rows], (x * x * d2)[rows], atol=1e-12, rtol=0)


def test_difference_fields_2d_keys(grid2):
    keys = set(difference_fields(build_potential(Example5(), grid2)))
    assert keys == {"x1*D1(V)", "x2*D2(V)", "x1*x1*D1(D1(V))", "x1*x2*D1(D2(V))", "x2*x2*D2(D2(V))"}


@given(st.floats(0.0, 4.0), st.floats(-3, 3), st.integers(0, 1000),
       st.lists(st.tuples(st.integers(-3, 3), st.floats(-1, 1), st.floats(-1, 1)), max_size=4))
def test_spec_json_roundtrip(gamma, amp, seed, terms):
    t = tuple(FourierTerm((k,), c, s) for k, c, s in terms) or None
    for spec in (Example5(gamma, t, amp, seed), Example4((gamma, 3.0, 0.5), (amp, 0.5, 0.5)),
                 Well(-abs(amp) - 0.1, gamma + 0.5), Custom("v.bin")):
        assert spec_from_dict(json.loads(json.dumps(spec_to_dict(spec)))) == spec


def test_spec_from_dict_rejects_garbage():
    with pytest.raises(ValidationError):
        spec_from_dict({"variant": "nope"})
    with pytest.raises(ValidationError):
        spec_from_dict({"variant": "well", "radius": 3})


@pytest.fixture(scope="module")
def report_grid():
    return make_grid(1, 32.0, 512, 1.0)


def test_report_zero_potential(report_grid):
    report = assumption_report(Field(report_grid, np.zeros(report_grid.shape)), report_grid)
    for row in report.rows:
        assert row.sup == 0 and row.compact_proxy and row.bounded_proxy


def test_report_example5_decay_exponent(report_grid):
    row = assumption_report(Example5(gamma=2.0), report_grid).row("x1*D1(V)")
    assert row.decay_exponent == pytest.approx(2.0, abs=0.15)


def test_report_discriminates(report_grid):
    decaying = assumption_report(Example5(gamma=1.0), report_grid)
    assert decaying.row("V").compact_proxy
    assert decaying.row("x1*D1(V)").compact_proxy
    assert all(r.bounded_proxy and np.isfinite(r.sigma_max) for r in decaying.rows)
    periodic = assumption_report(Example5(gamma=0.0), report_grid)
    assert not periodic.row("V").compact_proxy
    assert periodic.row("x1*D1(V)").sup == 0


def test_report_json(report_grid):
    data = json.loads(assumption_report(Example5(), report_grid).to_json())
    assert {r["name"] for r in data["rows"]} == {"V", "x1*D1(V)", "x1*x1*D1(D1(V))"}
    assert "not compactness proofs" in data["proxy_note"]
