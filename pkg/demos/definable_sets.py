"""
===============================
Distance predicates and graphs
===============================

Sets are handled through their distance functions: the three distance axioms
characterize them, zero sets round-trip, projections over a definable set
reduce to a penalty form, and function graphs satisfy exact distance
identities -- for nonexpansive functions.
"""

from fractions import Fraction as F

from affinelogic.definability import (
    FunctionTable,
    PredicateTable,
    check_distance_axioms,
    check_graph_identities,
    distance_predicate,
    inf_over_definable,
    invariant_type,
    is_definable_set,
    lambda_domination,
    predicate_from_formula,
    pushforward,
    zeroset_recover,
)
from affinelogic.model import FiniteStructure
from affinelogic.pra import build_algebra
from affinelogic.rationals import format_rational
from affinelogic.syntax import parse_formula
from affinelogic.typespace import FormulaFamily

M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
sig = M.signature()


def show(x):
    return format_rational(x)


# ----------------------------------------------------------------------------
# distance predicates satisfy the axioms and recover their zero sets

D = frozenset({(0,), (3,)})  # bottom and top of the algebra
P = distance_predicate(M, D)
print("distance to {zero, one}:", [show(P.values[(x,)]) for x in range(4)])
print("axioms:", check_distance_axioms(M, P).ok)
print("recovered:", sorted(zeroset_recover(M, P)) == sorted(D))

shifted = PredicateTable(1, {a: v + F(1, 10) for a, v in P.values.items()})
rep = check_distance_axioms(M, shifted)
print("shifted copy approachable?", rep.approachable.ok)
print()

# ----------------------------------------------------------------------------
# domination compares zero sets quantitatively

Q = distance_predicate(M, {(0,)})
res = lambda_domination(M, Q, P, F(0))
print(f"dist(..,{{0,1}}) <= lam * dist(..,{{0}}) with lam = {show(res.lam)}")
print()

# ----------------------------------------------------------------------------
# projecting a predicate over a definable set: min vs penalty form

dxy = predicate_from_formula(M, parse_formula("d(x, y)", sig), ("x", "y"))
proj = inf_over_definable(M, {(0,)}, dxy, F(1))
print("inf_y in {zero} d(x, y):", [show(v) for _, v in sorted(proj.table.values.items())])
print("penalty identity holds:", proj.identity_holds)
print("set {zero} definable over (mu):", is_definable_set(M, {(0,)},
      FormulaFamily(("x",), (parse_formula("mu(x)", sig),))).definable)
print()

# ----------------------------------------------------------------------------
# graph identities hold for nonexpansive maps and can fail beyond them

compl = FunctionTable(1, 1, F(1), {(x,): (x ^ 3,) for x in range(4)})
print("complement map (1-Lipschitz):", check_graph_identities(M, compl).ok)

stretch = FiniteStructure(
    elements=("p", "q", "r"),
    metric=(
        (F(0), F(1, 4), F(1, 2)),
        (F(1, 4), F(0), F(1, 4)),
        (F(1, 2), F(1, 4), F(0)),
    ),
    constants={},
    functions={},
    relations={},
)
f2 = FunctionTable(1, 1, F(2), {(0,): (0,), (1,): (2,), (2,): (2,)})
rep = check_graph_identities(stretch, f2)
print(f"2-Lipschitz stretch: forward {rep.forward_holds}, backward {rep.backward_holds}")
print()

# ----------------------------------------------------------------------------
# invariant types: a distribution fixed by pushing forward along f

family = FormulaFamily(("x",), (parse_formula("mu(x)", sig),))
walk = FunctionTable(1, 1, F(2), {(0,): (1,), (1,): (2,), (2,): (1,), (3,): (3,)})
t = invariant_type(M, walk, family)
mix = ", ".join(f"{M.elements[a[0]]}: {show(w)}" for a, w in sorted(t.witness.items()))
print(f"invariant distribution {{{mix}}} with mu-value {show(t.values[0])}")
print("pushforward fixed:", pushforward(walk, t.witness) == t.witness)
