"""Golden commutator identities for the shift-built conjugate operator.

Each identity pairs an expression with its expanded shift form.  The
right-hand sides carry the coefficients that actually hold; the
``LITERAL_VARIANTS`` table keeps common mis-scaled forms as negative
controls.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..grid import make_grid
from .normal import normalize
from .numeric import direct_eval, numeric_eval, relative_error


@dataclass(frozen=True)
class Case:
    lhs: str
    rhs: str
    d: int = 1


@dataclass(frozen=True)
class Identity:
    name: str
    cases: tuple[Case, ...]


def _a_definition(d: int) -> str:
    q = "(1/(2i*beta))*(T{j} - T{j}adj)"
    parts = [f"{q.format(j=j)}*x{j} + x{j}*{q.format(j=j)}" for j in range(1, d + 1)]
    return "(1/2)*(" + " + ".join(parts) + ")"


def _a_shift_form(d: int, first: str = "1/(2i*beta)") -> str:
    xs = " + ".join(f"x{j}*T{j} - x{j}*T{j}adj" for j in range(1, d + 1))
    ts = " + ".join(f"T{j} + T{j}adj" for j in range(1, d + 1))
    return f"({first})*({xs}) + (1/(4i))*({ts})"


GOLDEN = (
    Identity("A shift form", (Case(_a_definition(1), _a_shift_form(1), 1),
                              Case(_a_definition(2), _a_shift_form(2), 2))),
    Identity("[T,V]", (Case("[T1, V]", "beta*D1(V)*T1", 1),
                       Case("[T2, V]", "beta*D2(V)*T2", 2))),
    Identity("[xT,V]", (Case("[x1*T1, V]", "beta*x1*D1(V)*T1", 1),)),
    Identity("[xT*,V]", (Case("[x1*T1adj, V]", "-beta*T1adj*x1*D1(V) - beta^2*T1adj*D1(V)", 1),)),
    Identity(
        "[[V,xT],xT]",
        (
            Case("[[V, x1*T1], x2*T2]", "beta^2*x1*x2*D1(D2(V))*T1*T2", 2),
            Case(
                "[[V, x1*T1], x1*T1]",
                "beta^2*x1*x1*D1(D1(V))*T1*T1 + beta^2*T1*x1*D1(V)*T1"
                " - beta^3*T1*D1(V)*T1 - beta^2*x1*D1(V)*T1*T1",
                1,
            ),
        ),
    ),
)

# Forms with a 1/(4 i beta) prefactor, a missing sign, or beta in place of
# beta^2 on the diagonal terms; none of them is an operator identity.
LITERAL_VARIANTS = (
    Identity("A shift form, 1/(4i beta)", (Case(_a_definition(1), _a_shift_form(1, "1/(4i*beta)"), 1),)),
    Identity("[xT*,V], +beta T*(x DV) + beta T*(DV)",
             (Case("[x1*T1adj, V]", "beta*T1adj*x1*D1(V) + beta*T1adj*D1(V)", 1),)),
    Identity(
        "[[V,xT],xT], beta on delta terms",
        (Case("[[V, x1*T1], x1*T1]",
              "beta^2*x1*x1*D1(D1(V))*T1*T1 + beta*T1*x1*D1(V)*T1"
              " - beta*T1*D1(V)*T1 - beta*x1*D1(V)*T1*T1", 1),),
    ),
)


@dataclass
class CaseResult:
    lhs: str
    rhs: str
    d: int
    symbolic: bool
    lhs_vs_direct: float
    rhs_vs_direct: float
    lhs_vs_rhs: float

    def passed(self, tol: float) -> bool:
        return self.symbolic and max(self.lhs_vs_direct, self.rhs_vs_direct, self.lhs_vs_rhs) <= tol


@dataclass
class IdentityResult:
    name: str
    cases: list[CaseResult] = field(default_factory=list)
    tol: float = 1e-10

    @property
    def passed(self) -> bool:
        return all(c.passed(self.tol) for c in self.cases)

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "cases": [asdict(c) for c in self.cases]}


# (L, n) per dimension at beta = 0.5; beta != 1 separates beta from beta^2
CHECK_BETA = 0.5
_CHECK_GRIDS = {1: (8.0, 256), 2: (3.0, 48), 3: (2.5, 40)}


def check_identity(identity: Identity, rng: np.random.Generator, tol: float = 1e-10,
                   numeric: bool = True) -> IdentityResult:
    """Symbolic equality plus the two numeric routes on interior rows."""
    out = IdentityResult(identity.name, tol=tol)
    for case in identity.cases:
        lhs, rhs = normalize(case.lhs), normalize(case.rhs)
        errs = (0.0, 0.0, 0.0)
        if numeric:
            L, n = _CHECK_GRIDS[case.d]
            grid = make_grid(case.d, L, n, CHECK_BETA)
            names = lhs.functions() | rhs.functions()
            bindings = {name: rng.normal(size=grid.shape) for name in sorted(names)}
            rows = grid.interior_mask().ravel()
            a = numeric_eval(lhs, grid, bindings)
            b = numeric_eval(rhs, grid, bindings)
            errs = (relative_error(a, direct_eval(case.lhs, grid, bindings), rows),
                    relative_error(b, direct_eval(case.rhs, grid, bindings), rows),
                    relative_error(a, b, rows))
        out.cases.append(CaseResult(case.lhs, case.rhs, case.d, lhs == rhs, *errs))
    return out


def run_corpus(identities=GOLDEN, seed: int = 42, tol: float = 1e-10, numeric: bool = True):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    results = [check_identity(i, rng, tol, numeric) for i in identities]
    return results, time.perf_counter() - start


def load_corpus(path) -> tuple[Identity, ...]:
    """Read ``[{"name": ..., "cases": [{"lhs", "rhs", "d"}]}]`` from JSON."""
    raw = json.loads(Path(path).read_text())
    return tuple(Identity(item["name"], tuple(Case(c["lhs"], c["rhs"], int(c.get("d", 1)))
                                              for c in item["cases"])) for item in raw)
