"""Syntax trees for coefficient functions and operator expressions.

Coefficient trees (``CoeffExpr``) describe functions on R^d built from the
coordinates and named functions with shifts and forward differences.
Operator trees (``OpExpr``) combine multiplication operators, lattice
shifts, sums, products, scalar multiples and commutators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalars import BetaPoly, format_scalar

# coefficient functions ----------------------------------------------------


@dataclass(frozen=True)
class Coord:
    j: int


@dataclass(frozen=True)
class Fun:
    name: str


@dataclass(frozen=True)
class CConst:
    value: BetaPoly


@dataclass(frozen=True)
class CShift:
    """``e(x + sign*beta*e_j)``."""

    j: int
    sign: int
    arg: "CoeffExpr"


@dataclass(frozen=True)
class CDiff:
    """Forward difference quotient ``(e(x + beta e_j) - e(x)) / beta``."""

    j: int
    arg: "CoeffExpr"


@dataclass(frozen=True)
class CSum:
    terms: tuple


@dataclass(frozen=True)
class CProd:
    factors: tuple


@dataclass(frozen=True)
class CScale:
    scalar: BetaPoly
    arg: "CoeffExpr"


CoeffExpr = Coord | Fun | CConst | CShift | CDiff | CSum | CProd | CScale

# operators ----------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Mult:
    coeff: CoeffExpr


@dataclass(frozen=True)
class ShiftOp:
    j: int
    sign: int = 1


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Prod:
    factors: tuple


@dataclass(frozen=True)
class Scale:
    scalar: BetaPoly
    arg: "OpExpr"


@dataclass(frozen=True)
class Commutator:
    left: "OpExpr"
    right: "OpExpr"


OpExpr = Identity | Mult | ShiftOp | Sum | Prod | Scale | Commutator


# printing -------------------------------------------------------------------


def format_coeff(c: CoeffExpr, prec: int = 0) -> str:
    """Precedence: 0 sum context, 1 product context."""
    if isinstance(c, Coord):
        return f"x{c.j}"
    if isinstance(c, Fun):
        return c.name
    if isinstance(c, CConst):
        return format_scalar(c.value)
    if isinstance(c, CShift):
        return f"S{c.j}{'' if c.sign > 0 else 'adj'}({format_coeff(c.arg)})"
    if isinstance(c, CDiff):
        return f"D{c.j}({format_coeff(c.arg)})"
    if isinstance(c, CProd):
        return "*".join(format_coeff(f, 1) for f in c.factors)
    if isinstance(c, CScale):
        return _scaled(format_scalar(c.scalar), format_coeff(c.arg, 1), prec)
    if isinstance(c, CSum):
        text = _join_sum([format_coeff(t, 0) for t in c.terms])
        return f"({text})" if prec else text
    raise TypeError(f"not a coefficient expression: {c!r}")


def format_expr(e: OpExpr, prec: int = 0) -> str:
    if isinstance(e, Identity):
        return "1"
    if isinstance(e, Mult):
        c = e.coeff
        if isinstance(c, (CProd, CSum, CScale, CConst)):
            # bare products of coefficients would re-parse as operator products
            return f"M({format_coeff(c)})"
        return format_coeff(c, prec)
    if isinstance(e, ShiftOp):
        return f"T{e.j}{'' if e.sign > 0 else 'adj'}"
    if isinstance(e, Commutator):
        return f"[{format_expr(e.left)}, {format_expr(e.right)}]"
    if isinstance(e, Prod):
        return "*".join(format_expr(f, 1) for f in e.factors)
    if isinstance(e, Scale):
        if isinstance(e.arg, Identity):
            return format_scalar(e.scalar)
        return _scaled(format_scalar(e.scalar), format_expr(e.arg, 1), prec)
    if isinstance(e, Sum):
        text = _join_sum([format_expr(t, 0) for t in e.terms])
        return f"({text})" if prec else text
    raise TypeError(f"not an operator expression: {e!r}")


def _scaled(scalar: str, body: str, prec: int) -> str:
    if scalar == "1":
        return body
    if scalar == "-1":
        text = f"-{body}"
    else:
        text = f"{scalar}*{body}"
    return f"({text})" if prec and text.startswith("-") else text


def _join_sum(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out
