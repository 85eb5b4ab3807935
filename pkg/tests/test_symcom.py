import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftmourre.errors import DimensionMismatch, ExprSyntaxError, UnboundFunction, UnknownSymbol
from shiftmourre.grid import make_grid
from shiftmourre.operators import commutator, multiplication_op, shift_op
from shiftmourre.symcom import equal, format_expr, normalize, parse
from shiftmourre.symcom.corpus import GOLDEN, LITERAL_VARIANTS, load_corpus, run_corpus
from shiftmourre.symcom.expr import Commutator, Coord, Fun, Mult, Prod, Scale, ShiftOp, Sum
from shiftmourre.symcom.numeric import cross_check, direct_eval, numeric_eval, relative_error
from shiftmourre.symcom.scalars import BetaPoly, GaussianRational


# parser ------------------------------------------------------------------------

def test_parse_examples():
    assert parse("[T1, V]") == Commutator(ShiftOp(1, 1), Mult(Fun("V")))
    assert parse("x1*T1") == Prod((Mult(Coord(1)), ShiftOp(1, 1)))
    e = parse("(1/(2i)) * (T1 - T1adj)")
    assert isinstance(e, Scale) and e.scalar == BetaPoly.const(GaussianRational(Fraction(0), Fraction(-1, 2)))
    assert isinstance(e.arg, Sum)


@pytest.mark.parametrize("text,pos", [("[T1, V", 6), ("T1 + * V", 5), ("x1 $ T1", 3), ("", 0),
                                      ("T1 / x1", 3)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.pos == pos
    assert isinstance(info.value, SyntaxError)


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse("y1*T1")


def test_scalars():
    assert normalize("beta^-1*beta^2*T1") == normalize("beta*T1")
    assert normalize("(2i)*(1/(2i))") == normalize("1")
    assert normalize("3/4i*T1") == normalize("-3/4*i*T1")


# random expressions --------------------------------------------------------------

ATOMS = ["T1", "T1adj", "x1", "V", "W", "beta", "2", "(1/(2i))", "D1(V)", "S1adj(W)", "M(x1*V)"]


def expressions(max_leaves=6):
    leaf = st.sampled_from(ATOMS)

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: f"({p[0]} + {p[1]})"),
            st.tuples(children, children).map(lambda p: f"({p[0]} - {p[1]})"),
            st.tuples(children, children).map(lambda p: f"{p[0]}*{p[1]}"),
            st.tuples(children, children).map(lambda p: f"[{p[0]}, {p[1]}]"),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


@given(expressions())
def test_print_parse_roundtrip(text):
    e = parse(text)
    assert parse(format_expr(e)) == e


@given(expressions())
def test_normalize_idempotent(text):
    nf = normalize(text)
    assert normalize(str(nf)) == nf
    assert normalize(nf.to_expr()) == nf


@given(expressions(max_leaves=4))
def test_normal_form_terms_are_sorted_and_unique(text):
    terms = normalize(text).terms()
    keys = [(t.word, t.back, t.monomial) for t in terms]
    assert len(set(keys)) == len(keys)
    assert [t.sort_key() for t in terms] == sorted(t.sort_key() for t in terms)


@given(expressions(max_leaves=4), st.integers(0, 2**31 - 1))
def test_numeric_soundness(text, seed):
    grid = make_grid(1, 8.0, 64, 1.0)
    rng = np.random.default_rng(seed)
    bindings = {"V": rng.normal(size=grid.shape), "W": rng.normal(size=grid.shape)}
    result = cross_check(text, grid, bindings)
    assert result.ok(1e-10)


# normal forms ----------------------------------------------------------------------

def test_normalize_examples():
    assert equal("[T1, V]", "beta*D1(V)*T1")
    assert equal("[x1*T1, V]", "beta*x1*D1(V)*T1")
    nf = normalize("[x1*T1adj, V]")
    assert equal(nf, "-beta*S1adj(x1*D1(V))*T1adj - beta^2*S1adj(D1(V))*T1adj")
    # a single power of beta on the second term is not an identity
    assert not equal(nf, "-beta*S1adj(x1*D1(V))*T1adj - beta*S1adj(D1(V))*T1adj")
    assert equal(nf, "-beta*T1adj*x1*D1(V) - beta^2*T1adj*D1(V)")
    assert str(normalize("[T1, V]")) == "beta*D1(V)*T1"


def test_equal_examples():
    assert equal("T1*T1adj", "1")
    assert equal("[[V, x1*T1], x2*T2]", "beta^2*x1*x2*D1(D2(V))*T1*T2")
    assert not equal("[T1, V]", "beta*D1(V)*T1adj")


def test_shift_rewrite_into_differences():
    assert equal("S1(V)", "V + beta*D1(V)")
    assert equal("S1(x1)", "x1 + beta")


# numeric evaluation ----------------------------------------------------------------

def test_numeric_eval_matches_operator_commutator(rng):
    grid = make_grid(1, 4.0, 64, 0.5)
    v = rng.normal(size=grid.shape)
    lhs = numeric_eval(normalize("[T1,V]"), grid, {"V": v})
    rhs = commutator(shift_op(grid, 1), multiplication_op(grid, v)).dense()
    assert relative_error(lhs, rhs) <= 1e-12


def test_numeric_eval_identity(grid1):
    assert np.array_equal(numeric_eval(normalize("1"), grid1, {}), np.eye(grid1.n))


def test_numeric_eval_errors(grid1):
    with pytest.raises(UnboundFunction):
        numeric_eval(normalize("[T1, V]"), grid1, {})
    with pytest.raises(DimensionMismatch):
        numeric_eval(normalize("T2"), grid1, {})


def test_direct_eval_shift_form(grid1):
    from shiftmourre.symcom.corpus import _a_definition, _a_shift_form

    a = direct_eval(_a_definition(1), grid1, {})
    b = direct_eval(_a_shift_form(1), grid1, {})
    rows = grid1.interior_mask().ravel()
    assert relative_error(a, b, rows) <= 1e-12


# corpus ------------------------------------------------------------------------------

def test_golden_corpus_passes():
    results, seconds = run_corpus(GOLDEN)
    assert [r.passed for r in results] == [True] * 5
    assert seconds < 5.0


def test_literal_variants_are_rejected():
    results, _ = run_corpus(LITERAL_VARIANTS)
    for r in results:
        assert not r.passed
        assert all(not c.symbolic for c in r.cases)
        assert all(c.lhs_vs_rhs > 1e-3 for c in r.cases)


def test_load_corpus(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps([{"name": "wrong sign", "cases": [{"lhs": "[T1, V]", "rhs": "-beta*D1(V)*T1"}]}]))
    identities = load_corpus(path)
    results, _ = run_corpus(identities)
    assert not results[0].passed and results[0].name == "wrong sign"
