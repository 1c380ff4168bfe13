"""
=======================
Type-space as a polytope
=======================

Relative to a finite formula family, the realized types of a structure are
rational vectors.  Their hull has computable extreme points (with separating
functionals), exposed faces, an exact satisfiability dichotomy, and -- in the
first-order case -- a unique boundary decomposition for every point.
"""

from fractions import Fraction as F

from affinelogic.model import FiniteStructure, RelationInterp, eval_table
from affinelogic.pra import build_algebra
from affinelogic.rationals import format_rational
from affinelogic.syntax import parse_condition_line, parse_formula
from affinelogic.typespace import (
    BoundaryMeasure,
    FormulaFamily,
    affine_satisfiable,
    barycenter,
    exposed_face,
    extreme_points,
    is_face,
    keisler_decompose,
    mixture_type,
    realized_type,
    type_distance,
    type_hull,
)


def show(x):
    return format_rational(x)


# ----------------------------------------------------------------------------
# the 1-type hull of a two-atom algebra relative to F = (mu(x),)

M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
sig = M.signature()
family = FormulaFamily(("x",), (parse_formula("mu(x)", sig),))
hull = type_hull(M, 1, family)

print("realized type vectors:")
for i, v in enumerate(hull.vertices):
    labels = " ".join(M.elements[a[0]] for a in hull.realizations[i])
    print(f"  [{i}] ({show(v.values[0])})  realized by {labels}")

report = extreme_points(hull)
print("extreme:", list(report.extreme_indices))
for nv in report.non_extreme:
    mix = ", ".join(f"{j}: {show(w)}" for j, w in sorted(nv.weights.items()))
    print(f"  vertex {nv.index} = mixture {{{mix}}}")
print()

# ----------------------------------------------------------------------------
# exposed faces and the facial test

table = eval_table(M, parse_formula("mu(x)", sig), ("x",))
face = exposed_face(hull, table, maximize=True)
print("argmax of mu over the hull: vertices", list(face.vertex_indices))

conds = parse_condition_line("mu(x) = 1/2 * 1", sig)
rep = is_face(hull, conds)
print("is {mu = 1/2} a face?", rep.is_face)
if rep.violation:
    v = rep.violation
    print(
        f"  violated: ({show(v.inside[0])}) is a strict mixture of "
        f"({show(v.endpoint[0])}) and ({show(v.partner[0])})"
    )
print()

# ----------------------------------------------------------------------------
# the dichotomy: a witness distribution or a strict refutation

res = affine_satisfiable(M, conds)
mix = ", ".join(f"{M.elements[a[0]]}: {show(w)}" for a, w in sorted(res.witness.items()))
print(f"{{mu = 1/2}} satisfiable in the mean by {{{mix}}}")

bad = [
    *parse_condition_line("1 <= mu(x)", sig),
    *parse_condition_line("mu(x) <= 0 * 1", sig),
]
res = affine_satisfiable(M, bad)
print(
    "contradictory pair refuted: coefficients",
    tuple(show(c) for c in res.farkas),
    "margin",
    show(res.margin),
)
print()

# ----------------------------------------------------------------------------
# first-order structures: barycenter and its exact inverse

patterns = [(0, 0), (1, 0), (0, 1)]
N = FiniteStructure(
    elements=("u", "v", "w"),
    metric=tuple(
        tuple(F(0) if i == j else F(1) for j in range(3)) for i in range(3)
    ),
    constants={},
    functions={},
    relations={
        f"R{c}": RelationInterp(1, F(1), {(i,): F(patterns[i][c]) for i in range(3)})
        for c in range(2)
    },
)
fam2 = FormulaFamily(
    ("x",), tuple(parse_formula(f"R{c}(x)", N.signature()) for c in range(2))
)
hull2 = type_hull(N, 1, fam2)

measure = BoundaryMeasure({0: F(1, 2), 1: F(1, 4), 2: F(1, 4)})
p = barycenter(hull2, measure)
print("barycenter values:", tuple(show(x) for x in p.values))
back = keisler_decompose(hull2, p)
print("decomposed back:", {i: show(w) for i, w in sorted(back.weights.items())})
print()

# ----------------------------------------------------------------------------
# transport distance between witnessed types

t0 = realized_type(N, (0,), fam2)
t1 = realized_type(N, (1,), fam2)
half = mixture_type([t0, t1], [F(1, 2), F(1, 2)])
print("d(t0, t1) =", show(type_distance(t0, t1)))
print("d(t0, (t0+t1)/2) =", show(type_distance(t0, half)))
