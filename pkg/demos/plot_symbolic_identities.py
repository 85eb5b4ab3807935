"""
Commutator identities in normal form
====================================

Expressions in shifts, coordinates and multiplication operators are
brought to a canonical form where equal operators compare equal.
"""

from shiftmourre.symcom import equal, format_expr, normalize, parse
from shiftmourre.symcom.corpus import GOLDEN, run_corpus

###############################################################################
# Moving a shift past a potential produces a difference quotient.
print(format_expr(normalize("[T1, V]").to_expr()))
print(equal(parse("[T1, V]"), parse("beta*D1(V)*T1")))

###############################################################################
# The backward shift picks up a second-order term.
print(equal(parse("[x1*T1adj, V]"), parse("-beta*T1adj*x1*D1(V) - beta^2*T1adj*D1(V)")))

###############################################################################
# The whole golden set, checked symbolically and on random grid data.
results, seconds = run_corpus(GOLDEN)
for r in results:
    print(f"{r.name:<14} {'ok' if r.passed else 'FAIL'}")
print(f"{seconds:.2f} s")
