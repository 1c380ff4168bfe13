"""
=====================
Probability algebras
=====================

Finite measure algebras as bitmask lattices: order intervals have a closed
form for the distance, additive functions have interval-shaped argmax sets,
and generated subalgebras come from atom blocks.
"""

from fractions import Fraction as F

from affinelogic.pra import (
    AdditiveFunction,
    build_algebra,
    check_algebra_axioms,
    dcl,
    hahn_max_set,
    interval_distance,
    interval_projection,
    pra_definable_check,
)
from affinelogic.rationals import format_rational

A = build_algebra([F(1, 2), F(1, 3), F(1, 6)])
print(f"{A.size} elements over {A.k} atoms; axioms hold: {check_algebra_axioms(A)}")
print()


def show(x):
    return format_rational(x)


# ----------------------------------------------------------------------------
# distance to an order interval, in closed form, with the nearest point

a, b = A.from_label("100"), A.from_label("110")
for x in A.elements():
    d = interval_distance(A, x, a, b)
    p = interval_projection(A, x, a, b)
    print(f"d({A.label(x)}, [{A.label(a)},{A.label(b)}]) = {show(d):5}  nearest {A.label(p)}")
print()

# ----------------------------------------------------------------------------
# the maximizers of an additive function form an order interval

f = AdditiveFunction((F(1, 4), F(-1, 3), F(1, 6)))
rep = hahn_max_set(A, f)
print(
    f"max {show(rep.max_value)} attained exactly on "
    f"[{A.label(rep.lower)}, {A.label(rep.upper)}]"
)

g = AdditiveFunction((F(1, 2), F(0), F(-1, 2)))
rep = hahn_max_set(A, g)
members = A.interval(rep.lower, rep.upper)
print(
    f"with a zero atom the interval widens: "
    f"[{A.label(rep.lower)}, {A.label(rep.upper)}] = "
    + " ".join(A.label(x) for x in members)
)
print()

# ----------------------------------------------------------------------------
# generated subalgebras and interval-definable subsets

S = [A.from_label("110")]
closure = sorted(dcl(A, S))
print("dcl(110):", " ".join(A.label(x) for x in closure))

good = pra_definable_check(A, A.interval(a, b))
print(f"interval [{A.label(a)},{A.label(b)}] definable: {good.definable}")

gappy = pra_definable_check(A, [A.from_label("100"), A.from_label("111")])
print(
    f"{{100, 111}} definable: {gappy.definable} "
    f"(missing {A.label(gappy.witness)})"
)
