"""Normal forms: sums of ``scalar * Mult(coefficient) * shift word``.

Internally a coefficient is a polynomial in *shifted atoms*: the coordinates
``x_j`` and translates ``F@s`` (the function ``F`` evaluated at
``x + beta*s``).  Moving a shift to the right of a multiplication is the
single rewrite ``T^w Mult(c) = Mult(c(. + beta w)) T^w``; coordinates
translate symbolically, ``x_j(. + beta w) = x_j + beta w_j``.  This basis is
unique, so two expressions are equal iff their internal dictionaries are.

For display the translates are re-expressed through forward differences,
``F@s = sum_k C(s, k) beta^|k| D^k F`` for ``s >= 0``, after pulling out the
largest backward translate of each shift word.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

from ..errors import ValidationError
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
    format_expr,
)
from .parser import parse
from .scalars import BetaPoly

__all__ = ["Poly", "NormalForm", "Term", "normalize", "equal", "MAX_AXES"]

MAX_AXES = 3
ZERO_SHIFT = (0,) * MAX_AXES
_ONE = BetaPoly.const(1)


def _unit(j: int, k: int = 1) -> tuple[int, ...]:
    if not 1 <= j <= MAX_AXES:
        raise ValidationError(f"axis {j} outside 1..{MAX_AXES}")
    s = [0] * MAX_AXES
    s[j - 1] = k
    return tuple(s)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Polynomial over shifted atoms with :class:`BetaPoly` coefficients.

    Monomials are sorted tuples of atoms ``('f', name, shift)`` and
    ``('x', j)``; the empty tuple is the constant monomial.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc: dict = {}
        for mono, c in (terms or {}).items():
            acc[mono] = acc.get(mono, BetaPoly()) + c
        self.terms = {m: c for m, c in acc.items() if c}

    @classmethod
    def const(cls, c: BetaPoly) -> Poly:
        return cls({(): c})

    @classmethod
    def atom(cls, a) -> Poly:
        return cls({(a,): _ONE})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: Poly) -> Poly:
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, BetaPoly()) + c
        return Poly(acc)

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                acc[m] = acc.get(m, BetaPoly()) + c1 * c2
        return Poly(acc)

    def scale(self, s: BetaPoly) -> Poly:
        return Poly({m: c * s for m, c in self.terms.items()})

    def shift(self, w: tuple[int, ...]) -> Poly:
        """Translate every atom by ``beta * w``."""
        if w == ZERO_SHIFT:
            return self
        out = Poly()
        for mono, c in self.terms.items():
            acc = Poly.const(c)
            for atom in mono:
                acc = acc * _shift_atom(atom, w)
            out = out + acc
        return out

    def functions(self) -> set[str]:
        return {a[1] for mono in self.terms for a in mono if a[0] == "f"}

    def has_coordinates(self) -> bool:
        return any(a[0] == "x" for mono in self.terms for a in mono)


def _shift_atom(atom, w) -> Poly:
    if atom[0] == "f":
        return Poly.atom(("f", atom[1], _add(atom[2], w)))
    j = atom[1]
    out = Poly.atom(atom)
    if w[j - 1]:
        out = out + Poly.const(BetaPoly.beta(1) * w[j - 1])
    return out


def coeff_poly(c) -> Poly:
    if isinstance(c, Coord):
        _unit(c.j)
        return Poly.atom(("x", c.j))
    if isinstance(c, Fun):
        return Poly.atom(("f", c.name, ZERO_SHIFT))
    if isinstance(c, CConst):
        return Poly.const(c.value)
    if isinstance(c, CShift):
        return coeff_poly(c.arg).shift(_unit(c.j, c.sign))
    if isinstance(c, CDiff):
        p = coeff_poly(c.arg)
        return (p.shift(_unit(c.j)) - p).scale(BetaPoly.beta(-1))
    if isinstance(c, CSum):
        out = Poly()
        for t in c.terms:
            out = out + coeff_poly(t)
        return out
    if isinstance(c, CProd):
        out = Poly.const(_ONE)
        for f in c.factors:
            out = out * coeff_poly(f)
        return out
    if isinstance(c, CScale):
        return coeff_poly(c.arg).scale(c.scalar)
    raise TypeError(f"not a coefficient expression: {c!r}")


@dataclass(frozen=True)
class Term:
    """One canonical term ``scalar * Mult(S^{-back}(monomial)) * T^word``.

    ``monomial`` holds ``('x', j)`` and ``('d', name, diff)`` atoms, where
    ``diff`` counts forward differences per axis.
    """

    word: tuple[int, ...]
    back: tuple[int, ...]
    monomial: tuple
    scalar: BetaPoly

    def sort_key(self):
        return (self.word, self.back, self.monomial, self.scalar.terms)


class NormalForm:
    """Canonical sum of coefficient polynomials attached to shift words."""

    __slots__ = ("words",)

    def __init__(self, words=None):
        self.words = {w: p for w, p in (words or {}).items() if p}

    @classmethod
    def identity(cls) -> NormalForm:
        return cls({ZERO_SHIFT: Poly.const(_ONE)})

    def __eq__(self, other):
        return isinstance(other, NormalForm) and self.words == other.words

    def __hash__(self):
        return hash(frozenset(self.words.items()))

    def __add__(self, other: NormalForm) -> NormalForm:
        acc = dict(self.words)
        for w, p in other.words.items():
            acc[w] = acc[w] + p if w in acc else p
        return NormalForm(acc)

    def __neg__(self):
        return NormalForm({w: -p for w, p in self.words.items()})

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: NormalForm) -> NormalForm:
        acc: dict = {}
        for w1, p1 in self.words.items():
            for w2, p2 in other.words.items():
                w = _add(w1, w2)
                term = p1 * p2.shift(w1)
                acc[w] = acc[w] + term if w in acc else term
        return NormalForm(acc)

    def scale(self, s: BetaPoly) -> NormalForm:
        return NormalForm({w: p.scale(s) for w, p in self.words.items()})

    def is_zero(self) -> bool:
        return not self.words

    def functions(self) -> set[str]:
        return set().union(*(p.functions() for p in self.words.values())) if self.words else set()

    def max_axis(self) -> int:
        axes = [0]
        for w, p in self.words.items():
            axes += [i + 1 for i, k in enumerate(w) if k]
            for mono in p.terms:
                for a in mono:
                    if a[0] == "x":
                        axes.append(a[1])
                    else:
                        axes += [i + 1 for i, k in enumerate(a[2]) if k]
        return max(axes)

    # canonical display ------------------------------------------------------

    def terms(self) -> list[Term]:
        out = []
        for w, p in self.words.items():
            back = _max_back(p)
            for mono, c in _difference_basis(p.shift(back)).terms.items():
                out.append(Term(w, back, mono, c))
        return sorted(out, key=Term.sort_key)

    def to_expr(self):
        terms = [_term_expr(t) for t in self.terms()]
        if not terms:
            return Scale(BetaPoly(), Identity())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def __str__(self):
        return format_expr(self.to_expr())

    def __repr__(self):
        return f"NormalForm({self})"


def _max_back(p: Poly) -> tuple[int, ...]:
    back = [0] * MAX_AXES
    for mono in p.terms:
        for a in mono:
            if a[0] == "f":
                for i, k in enumerate(a[2]):
                    back[i] = max(back[i], -k)
    return tuple(back)


def _difference_basis(p: Poly) -> Poly:
    """Rewrite nonnegative translates ``F@s`` through forward differences."""
    out = Poly()
    for mono, c in p.terms.items():
        acc = Poly.const(c)
        for a in mono:
            if a[0] == "x":
                acc = acc * Poly.atom(a)
                continue
            _, name, s = a
            if min(s) < 0:
                raise AssertionError("negative translate survived the back shift")
            expansion = Poly()
            for k in product(*(range(si + 1) for si in s)):
                weight = 1
                for si, ki in zip(s, k):
                    weight *= comb(si, ki)
                expansion = expansion + Poly({(("d", name, k),): BetaPoly.beta(sum(k)) * weight})
            acc = acc * expansion
        out = out + acc
    return out


def _atom_coeff(a):
    if a[0] == "x":
        return Coord(a[1])
    _, name, diff = a
    c = Fun(name)
    for j in range(MAX_AXES, 0, -1):
        for _ in range(diff[j - 1]):
            c = CDiff(j, c)
    return c


def _term_expr(t: Term):
    factors = []
    if t.monomial:
        coeff = [_atom_coeff(a) for a in sorted(t.monomial, key=lambda a: a[0] != "x")]
        c = coeff[0] if len(coeff) == 1 else CProd(tuple(coeff))
        for j in range(MAX_AXES, 0, -1):
            for _ in range(t.back[j - 1]):
                c = CShift(j, -1, c)
        factors.append(Mult(c))
    for j in range(1, MAX_AXES + 1):
        k = t.word[j - 1]
        factors += [ShiftOp(j, 1 if k > 0 else -1)] * abs(k)
    if not factors:
        body = Identity()
    elif len(factors) == 1:
        body = factors[0]
    else:
        body = Prod(tuple(factors))
    if t.scalar == _ONE and not isinstance(body, Identity):
        return body
    return Scale(t.scalar, body)


def normalize(e) -> NormalForm:
    """Normal form of an operator expression (text is parsed first)."""
    if isinstance(e, str):
        e = parse(e)
    if isinstance(e, NormalForm):
        return e
    if isinstance(e, Identity):
        return NormalForm.identity()
    if isinstance(e, ShiftOp):
        return NormalForm({_unit(e.j, e.sign): Poly.const(_ONE)})
    if isinstance(e, Mult):
        return NormalForm({ZERO_SHIFT: coeff_poly(e.coeff)})
    if isinstance(e, Sum):
        out = NormalForm()
        for t in e.terms:
            out = out + normalize(t)
        return out
    if isinstance(e, Prod):
        out = NormalForm.identity()
        for f in e.factors:
            out = out @ normalize(f)
        return out
    if isinstance(e, Scale):
        return normalize(e.arg).scale(e.scalar)
    if isinstance(e, Commutator):
        a, b = normalize(e.left), normalize(e.right)
        return a @ b - b @ a
    raise TypeError(f"not an operator expression: {e!r}")


def equal(a, b) -> bool:
    return normalize(a) == normalize(b)
