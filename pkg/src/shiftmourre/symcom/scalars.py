"""Exact scalars: Gaussian rationals and Laurent polynomials in beta."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True, order=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value))

    def __add__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.of(other))

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        den = o.re**2 + o.im**2
        if den == 0:
            raise ZeroDivisionError("division by zero scalar")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return _fmt_gauss(self)


ONE = GaussianRational(Fraction(1))
I_UNIT = GaussianRational(Fraction(0), Fraction(1))


def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _fmt_gauss(z: GaussianRational) -> str:
    if not z.im:
        return _fmt_fraction(z.re)
    imag = "i" if z.im == 1 else "-i" if z.im == -1 else f"{_fmt_fraction(z.im)}*i"
    if not z.re:
        return imag
    sign = " - " if z.im < 0 else " + "
    imag_abs = "i" if abs(z.im) == 1 else f"{_fmt_fraction(abs(z.im))}*i"
    return f"{_fmt_fraction(z.re)}{sign}{imag_abs}"


class BetaPoly:
    """Finite sum ``sum_p c_p beta**p`` with Gaussian rational ``c_p``.

    Immutable and hashable; the zero polynomial has no terms.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc: dict[int, GaussianRational] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for p, c in items:
            c = GaussianRational.of(c)
            acc[p] = acc.get(p, GaussianRational()) + c
        self._terms = tuple(sorted((p, c) for p, c in acc.items() if c))

    @classmethod
    def const(cls, c) -> BetaPoly:
        return cls([(0, c)])

    @classmethod
    def beta(cls, power: int = 1) -> BetaPoly:
        return cls([(power, ONE)])

    @property
    def terms(self):
        return self._terms

    def __eq__(self, other):
        return isinstance(other, BetaPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __lt__(self, other):
        return self._terms < other._terms

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        return BetaPoly(list(self._terms) + list(_as_poly(other)._terms))

    __radd__ = __add__

    def __neg__(self):
        return BetaPoly([(p, -c) for p, c in self._terms])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __mul__(self, other):
        other = _as_poly(other)
        return BetaPoly([(p + q, a * b) for p, a in self._terms for q, b in other._terms])

    __rmul__ = __mul__

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def inverse(self) -> BetaPoly:
        if not self.is_monomial():
            raise ZeroDivisionError(f"only single-term scalars are invertible, got {self}")
        p, c = self._terms[0]
        return BetaPoly([(-p, GaussianRational(Fraction(1)) / c)])

    def __truediv__(self, other):
        return self * _as_poly(other).inverse()

    def evaluate(self, beta: float) -> complex:
        return sum((complex(c) * beta**p for p, c in self._terms), 0j)

    def is_real(self) -> bool:
        return all(not c.im for _, c in self._terms)

    def __repr__(self):
        return f"BetaPoly({self})"

    def __str__(self):
        return format_scalar(self)


def _as_poly(x) -> BetaPoly:
    return x if isinstance(x, BetaPoly) else BetaPoly.const(x)


def _fmt_monomial(p: int, c: GaussianRational) -> str:
    if p == 0:
        return f"({_fmt_gauss(c)})" if c.re and c.im else _fmt_gauss(c)
    b ="beta" if p == 1 else f"beta^{p}"
    if c == ONE:
        return b
    if c == -ONE:
        return f"-{b}"
    text = _fmt_gauss(c)
    if c.re and c.im:
        text = f"({text})"
    return f"{text}*{b}"


def format_scalar(s: BetaPoly) -> str:
    """Text in the expression grammar; multi-term values are parenthesized."""
    if not s:
        return "0"
    parts = [_fmt_monomial(p, c) for p, c in s.terms]
    if len(parts) == 1:
        return parts[0]
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return f"({out})"
