"""Recursive-descent parser for operator expressions.

Grammar::

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := scalar | atom | call | '[' expr ',' expr ']' | '(' expr ')'
    atom    := 'T' digit ['adj'] | 'x' digit | 'V' | Name
    call    := ('D' digit | 'S' digit ['adj'] | 'M') '(' expr ')'
    scalar  := number | number 'i' | 'i' | 'beta' ['^' ['-'] int]

``D1(e)`` is the forward difference of a coefficient, ``S1(e)`` and
``S1adj(e)`` its forward/backward translate, ``M(e)`` the multiplication
operator by a product or sum of coefficients.  Only scalar divisors are
allowed after ``/``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ExprSyntaxError, UnknownSymbol
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
)
from .scalars import I_UNIT, BetaPoly, GaussianRational

__all__ = ["parse", "to_coeff"]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\],])
    """,
    re.VERBOSE,
)

_SHIFT = re.compile(r"T([1-9])(adj)?$")
_COORD = re.compile(r"x([1-9])$")
_DIFF = re.compile(r"D([1-9])$")
_CSHIFT = re.compile(r"S([1-9])(adj)?$")
_FUN = re.compile(r"[A-Z][A-Za-z0-9_]*$")


class _Tok:
    __slots__ = ("kind", "text", "pos", "value")

    def __init__(self, kind, text, pos, value=None):
        self.kind, self.text, self.pos, self.value = kind, text, pos, value


def _tokenize(text: str) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if m.group("number"):
            value = GaussianRational.of(Fraction(m.group("number")))
            if m.group("imag"):
                value = value * I_UNIT
            out.append(_Tok("scalar", m.group(0), pos, BetaPoly.const(value)))
        elif m.group("name"):
            out.append(_Tok("name", m.group("name"), pos))
        elif m.group("op"):
            out.append(_Tok(m.group("op"), m.group("op"), pos))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


def _is_scalar(e) -> bool:
    return isinstance(e, Scale) and isinstance(e.arg, Identity)


def _scalar(value: BetaPoly) -> Scale:
    return Scale(value, Identity())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ExprSyntaxError(msg, self.text, tok.pos)

    def eat(self, kind) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise self.error(f"expected {want}, got {got}")
        self.i += 1
        return tok

    # expr := ['-'] term (('+'|'-') term)*
    def expr(self):
        negate = False
        if self.tok.kind == "-":
            self.eat("-")
            negate = True
        terms = [self.term(negate)]
        while self.tok.kind in ("+", "-"):
            negate = self.eat(self.tok.kind).kind == "-"
            terms.append(self.term(negate))
        return _make_sum(terms)

    def term(self, negate=False):
        scalar = BetaPoly.const(-1 if negate else 1)
        factors = []
        first = True
        while True:
            if not first:
                if self.tok.kind == "*":
                    self.eat("*")
                elif self.tok.kind == "/":
                    tok = self.eat("/")
                    divisor = self.factor()
                    if not _is_scalar(divisor):
                        raise self.error("only scalars may appear after '/'", tok)
                    try:
                        scalar = scalar / divisor.scalar
                    except ZeroDivisionError as exc:
                        raise self.error(str(exc), tok) from None
                    continue
                else:
                    break
            first = False
            f = self.factor()
            if isinstance(f, Scale):
                scalar = scalar * f.scalar
                f = f.arg
            if isinstance(f, Identity):
                continue
            if isinstance(f, Prod):
                factors.extend(f.factors)
            else:
                factors.append(f)
        if not factors:
            body = Identity()
        elif len(factors) == 1:
            body = factors[0]
        else:
            body = Prod(tuple(factors))
        if scalar == BetaPoly.const(1) and not isinstance(body, Identity):
            return body
        return Scale(scalar, body)

    def factor(self):
        tok = self.tok
        if tok.kind == "scalar":
            self.eat("scalar")
            return _scalar(tok.value)
        if tok.kind == "(":
            self.eat("(")
            e = self.expr()
            self.eat(")")
            return e
        if tok.kind == "[":
            self.eat("[")
            a = self.expr()
            self.eat(",")
            b = self.expr()
            self.eat("]")
            return Commutator(a, b)
        if tok.kind == "name":
            return self.named()
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")

    def named(self):
        tok = self.eat("name")
        name = tok.text
        if name == "i":
            return _scalar(BetaPoly.const(I_UNIT))
        if name == "beta":
            power = 1
            if self.tok.kind == "^":
                self.eat("^")
                sign = 1
                if self.tok.kind == "-":
                    self.eat("-")
                    sign = -1
                num = self.eat("scalar")
                if not re.fullmatch(r"\d+", num.text):
                    raise self.error("beta exponent must be an integer", num)
                power = sign * int(num.text)
            return _scalar(BetaPoly.beta(power))
        if self.tok.kind == "(" and (name == "M" or _DIFF.match(name) or _CSHIFT.match(name)):
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            coeff = to_coeff(inner, self.text, tok.pos)
            if name == "M":
                return Mult(coeff)
            if m := _DIFF.match(name):
                return Mult(CDiff(int(m.group(1)), coeff))
            m = _CSHIFT.match(name)
            return Mult(CShift(int(m.group(1)), -1 if m.group(2) else 1, coeff))
        if m := _SHIFT.match(name):
            return ShiftOp(int(m.group(1)), -1 if m.group(2) else 1)
        if m := _COORD.match(name):
            return Mult(Coord(int(m.group(1))))
        if _FUN.match(name) and not (_DIFF.match(name) or _CSHIFT.match(name) or name == "M"):
            return Mult(Fun(name))
        raise UnknownSymbol(f"unknown symbol {name!r} at position {tok.pos}")


def _make_sum(terms):
    flat = []
    for t in terms:
        flat.extend(t.terms if isinstance(t, Sum) else [t])
    if all(_is_scalar(t) for t in flat):
        total = BetaPoly()
        for t in flat:
            total = total + t.scalar
        return _scalar(total)
    return flat[0] if len(flat) == 1 else Sum(tuple(flat))


def to_coeff(e, text="", pos=0):
    """Reinterpret a multiplication-only operator tree as a coefficient tree."""
    if isinstance(e, Mult):
        return e.coeff
    if isinstance(e, Identity):
        return CConst(BetaPoly.const(1))
    if isinstance(e, Scale):
        if isinstance(e.arg, Identity):
            return CConst(e.scalar)
        return CScale(e.scalar, to_coeff(e.arg, text, pos))
    if isinstance(e, Prod):
        return CProd(tuple(to_coeff(f, text, pos) for f in e.factors))
    if isinstance(e, Sum):
        return CSum(tuple(to_coeff(t, text, pos) for t in e.terms))
    raise ExprSyntaxError("shift operators and commutators are not coefficient functions", text, pos)


def parse(text: str):
    """Parse ``text`` into an operator expression tree.

    Raises
    ------
    ExprSyntaxError
        With the character offset of the offending token.
    UnknownSymbol
        For lowercase identifiers other than ``x<j>``, ``beta`` and ``i``.
    """
    p = _Parser(text)
    e = p.expr()
    p.eat("end")
    return e
