"""
===============================
Formulas, certificates, models
===============================

Parse affine formulas, read off their Lipschitz certificates, and evaluate
them in a small finite metric structure -- everything in exact rationals.
"""

from fractions import Fraction as F

from affinelogic.model import automorphisms, eval_formula, validate_structure
from affinelogic.pra import build_algebra
from affinelogic.rationals import format_rational
from affinelogic.syntax import certificate, free_vars, parse_formula, render

# ----------------------------------------------------------------------------
# a structure to play with: the probability algebra on two atoms of mass 1/2,
# exported as a 4-element metric structure (distance = measure of the xor)

M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
print("elements:", ", ".join(M.elements))
print("valid:", validate_structure(M).ok)
print("automorphisms:", len(automorphisms(M)))  # identity + the atom swap
print()

sig = M.signature()

# ----------------------------------------------------------------------------
# parsing and rendering round-trip

for text in [
    "sup y. d(x, y)",
    "2 * mu(x) + -1 * mu(meet(x, y))",
    "inf z. d(z, join(x, y)) + 1/2 * 1",
]:
    phi = parse_formula(text, sig)
    print(f"{text!r:48} -> {render(phi)}  (free: {sorted(free_vars(phi))})")
print()

# ----------------------------------------------------------------------------
# certificates: a slope bound lam and a value bound b, computed syntactically

for text in ["d(x, y)", "2 * mu(x) + mu(y)", "sup y. d(x, y) + -1 * mu(x)"]:
    cert = certificate(parse_formula(text, sig), sig)
    print(
        f"{text:32} lam = {format_rational(cert.lam):5} "
        f"bound = {format_rational(cert.bound)}"
    )
print()

# ----------------------------------------------------------------------------
# evaluation is a table walk over element indices

phi = parse_formula("sup y. d(x, y) + -1 * mu(x)", sig)
for x in range(M.size):
    value = eval_formula(M, phi, {"x": x})
    print(f"phi at {M.elements[x]}: {format_rational(value)}")
