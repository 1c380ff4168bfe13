"""Distance predicates, zero-set recovery, domination, and definability checks.

A predicate table is definable over a formula family exactly when it factors
affinely through the family's evaluation vectors; a tuple set is definable
when its distance predicate does.  The finite setting makes every check an
exact computation: linear solves, small LPs, exhaustive minima.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .model import FiniteStructure, automorphisms, eval_table
from .typespace import (
    FormulaFamily,
    TypeVector,
    affine_satisfiable_tables,
    factor_table_through_family,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class DefinabilityError(ValueError):
    pass


@dataclass
class PredicateTable:
    """A total [0,1]-free real-valued table over n-tuples of a structure."""

    arity: int
    values: dict[tuple[int, ...], Fraction]


@dataclass
class FunctionTable:
    """A total map M^n -> M^m given entry-wise, with a declared constant."""

    arity_in: int
    arity_out: int
    lam: Fraction
    table: dict[tuple[int, ...], tuple[int, ...]]


def validate_predicate(M: FiniteStructure, P: PredicateTable) -> None:
    expected = set(itertools.product(range(M.size), repeat=P.arity))
    if set(P.values) != expected:
        raise DefinabilityError(
            f"predicate table must cover all {len(expected)} tuples of arity {P.arity}"
        )


def validate_function_table(M: FiniteStructure, f: FunctionTable) -> None:
    expected = set(itertools.product(range(M.size), repeat=f.arity_in))
    if set(f.table) != expected:
        raise DefinabilityError("function table must cover every input tuple")
    for args, out in f.table.items():
        if len(out) != f.arity_out:
            raise DefinabilityError(f"output arity mismatch at {args}")
        if any(not 0 <= x < M.size for x in out):
            raise DefinabilityError(f"output out of range at {args}")
    for a in expected:
        for b in expected:
            if M.tuple_distance(f.table[a], f.table[b]) > f.lam * M.tuple_distance(a, b):
                raise DefinabilityError(
                    f"function table violates its declared constant at {a}, {b}"
                )


def predicate_from_formula(
    M: FiniteStructure, phi, variables: Sequence[str]
) -> PredicateTable:
    """Tabulate a formula as a predicate over the given variable order."""
    variables = tuple(variables)
    return PredicateTable(len(variables), eval_table(M, phi, variables))


def _tuples(M: FiniteStructure, n: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(M.size), repeat=n))


def _normalize_set(D, n: int | None = None) -> tuple[frozenset[tuple[int, ...]], int]:
    tuples = frozenset(tuple(a) for a in D)
    if tuples:
        arities = {len(a) for a in tuples}
        if len(arities) != 1:
            raise DefinabilityError("set members must share one arity")
        found = arities.pop()
        if n is not None and n != found:
            raise DefinabilityError("declared arity does not match the set")
        return tuples, found
    if n is None:
        raise DefinabilityError("empty set needs an explicit arity")
    return tuples, n


# ---------------------------------------------------------------------------
# distance predicates


def distance_predicate(
    M: FiniteStructure, D, n: int | None = None
) -> PredicateTable:
    """Distance-to-D table in the sum metric on tuples.

    For empty D the result is the constant sup of the tuple metric (n times
    the diameter), the value of an infimum over nothing in this calculus.
    """
    tuples, n = _normalize_set(D, n)
    if not tuples:
        top = Fraction(n) * M.diameter()
        return PredicateTable(n, {a: top for a in _tuples(M, n)})
    values = {
        a: min(M.tuple_distance(a, b) for b in tuples) for a in _tuples(M, n)
    }
    return PredicateTable(n, values)


@dataclass
class AxiomCheck:
    ok: bool
    witness: tuple | None = None


@dataclass
class DistanceAxiomReport:
    """Per-axiom results: nonnegativity, nonexpansiveness, approachability.

    Approachability asks, for every point a, whether a distribution over
    tuples can have zero mean P while staying within P(a) of a in the mean;
    failures carry the Farkas coefficients of the per-point condition pair.
    """

    nonnegative: AxiomCheck
    nonexpansive: AxiomCheck
    approachable: AxiomCheck

    @property
    def ok(self) -> bool:
        return self.nonnegative.ok and self.nonexpansive.ok and self.approachable.ok

    def __bool__(self) -> bool:
        return self.ok


def check_distance_axioms(M: FiniteStructure, P: PredicateTable) -> DistanceAxiomReport:
    validate_predicate(M, P)
    tuples = _tuples(M, P.arity)

    nonneg = AxiomCheck(True)
    for a in tuples:
        if P.values[a] < 0:
            nonneg = AxiomCheck(False, (a,))
            break

    nonexp = AxiomCheck(True)
    for a in tuples:
        for b in tuples:
            if P.values[a] - P.values[b] > M.tuple_distance(a, b):
                nonexp = AxiomCheck(False, (a, b))
                break
        if not nonexp.ok:
            break

    approach = AxiomCheck(True)
    for a in tuples:
        gaps = [
            {y: -P.values[y] for y in tuples},
            {y: P.values[a] - M.tuple_distance(a, y) for y in tuples},
        ]
        res = affine_satisfiable_tables(tuples, gaps)
        if not res.satisfiable:
            approach = AxiomCheck(False, (a, res.farkas))
            break

    return DistanceAxiomReport(nonneg, nonexp, approach)


def zeroset_recover(M: FiniteStructure, P: PredicateTable) -> frozenset[tuple[int, ...]]:
    """Zero set of a predicate satisfying the distance axioms.

    Refuses when the axioms fail.  When they hold, the zero set is nonempty
    and its distance predicate reproduces P exactly.
    """
    report = check_distance_axioms(M, P)
    if not report.ok:
        raise DefinabilityError(f"distance axioms fail, refusing to recover: {report}")
    zero = frozenset(a for a, v in P.values.items() if v == 0)
    back = distance_predicate(M, zero, P.arity)
    if back.values != P.values:
        raise DefinabilityError("recovered set does not reproduce the predicate")
    return zero


# ---------------------------------------------------------------------------
# domination


@dataclass
class DominationResult:
    """Least lam with Q <= lam * P + eps, or a zero-set witness against it."""

    dominates: bool
    lam: Fraction | None = None
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.dominates


def lambda_domination(
    M: FiniteStructure, P: PredicateTable, Q: PredicateTable, eps: Fraction
) -> DominationResult:
    """Smallest lam >= 0 with Q <= lam * P + eps, when one exists.

    Domination at every eps > 0 is exactly zero-set containment: if some a
    has P(a) = 0 < Q(a), no lam works once eps < Q(a), and that witness is
    returned instead.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise DefinabilityError("eps must be nonnegative")
    if P.arity != Q.arity:
        raise DefinabilityError("P and Q must share an arity")
    validate_predicate(M, P)
    validate_predicate(M, Q)
    for a in sorted(P.values):
        if P.values[a] == 0 and Q.values[a] > 0:
            return DominationResult(False, witness=a)
    lam = ZERO
    for a, pv in P.values.items():
        if pv > 0:
            need = (Q.values[a] - eps) / pv
            if need > lam:
                lam = need
    for a in P.values:
        assert Q.values[a] <= lam * P.values[a] + eps
    return DominationResult(True, lam=lam)


# ---------------------------------------------------------------------------
# definability checks


@dataclass
class AffineWitness:
    """Q(a) = offset + coeffs . (family values at a), for every tuple a."""

    offset: Fraction
    coeffs: tuple[Fraction, ...]
    family: FormulaFamily


@dataclass
class DefinabilityReport:
    definable: bool
    witness: AffineWitness | None = None
    conflict: linalg.FactorConflict | None = None
    residue: linalg.FactorResidue | None = None

    def __bool__(self) -> bool:
        return self.definable


def is_definable_predicate(
    M: FiniteStructure, P: PredicateTable, family: FormulaFamily
) -> DefinabilityReport:
    """Does P factor affinely through the family's evaluation vectors?

    Failure certificates: either two tuples with identical family vectors
    but different P values, or multipliers showing the linear system has no
    solution over the distinct vectors.
    """
    validate_predicate(M, P)
    if P.arity != family.arity:
        raise DefinabilityError("predicate arity must match the family")
    res = factor_table_through_family(M, P.values, family)
    if res.ok:
        assert res.offset is not None and res.coeffs is not None
        return DefinabilityReport(
            True, witness=AffineWitness(res.offset, res.coeffs, family)
        )
    return DefinabilityReport(False, conflict=res.conflict, residue=res.residue)


@dataclass
class DefinableSetReport:
    definable: bool
    distance: PredicateTable
    witness: AffineWitness | None = None
    conflict: linalg.FactorConflict | None = None
    residue: linalg.FactorResidue | None = None

    def __bool__(self) -> bool:
        return self.definable


def is_definable_set(
    M: FiniteStructure, D, family: FormulaFamily, n: int | None = None
) -> DefinableSetReport:
    """A set is definable over F exactly when its distance table is."""
    dist = distance_predicate(M, D, n)
    inner = is_definable_predicate(M, dist, family)
    return DefinableSetReport(
        inner.definable, dist, inner.witness, inner.conflict, inner.residue
    )


# ---------------------------------------------------------------------------
# projections over a set


@dataclass
class ProjectionReport:
    """inf over D of P, with the penalty-form identity checked exactly.

    table[x] = min over b in D of P(x, b); identity_holds records that
    min over all z of (P(x, z) + lam * dist(z, D)) gives the same table.
    """

    table: PredicateTable
    identity_holds: bool
    lam: Fraction


def inf_over_definable(
    M: FiniteStructure, D, P: PredicateTable, lam: Fraction, n: int | None = None
) -> ProjectionReport:
    """Project P by an exact minimum over D in its trailing coordinates.

    P must be lam-Lipschitz in the trailing block (validated exhaustively);
    that is what makes the penalty form with lam * distance-to-D agree with
    the direct minimum.
    """
    lam = Fraction(lam)
    if lam < 0:
        raise DefinabilityError("lam must be nonnegative")
    tuples_D, n = _normalize_set(D, n)
    if not tuples_D:
        raise DefinabilityError("D must be nonempty")
    validate_predicate(M, P)
    m = P.arity - n
    if m < 0:
        raise DefinabilityError("P arity must be at least the set arity")
    xs = _tuples(M, m)
    ys = _tuples(M, n)
    for x in xs:
        for y1 in ys:
            for y2 in ys:
                if abs(P.values[x + y1] - P.values[x + y2]) > lam * M.tuple_distance(y1, y2):
                    raise DefinabilityError(
                        f"P is not {lam}-Lipschitz in the trailing block at {x}, {y1}, {y2}"
                    )
    dist = distance_predicate(M, tuples_D, n)
    q = {x: min(P.values[x + b] for b in tuples_D) for x in xs}
    identity = all(
        min(P.values[x + z] + lam * dist.values[z] for z in ys) == q[x] for x in xs
    )
    return ProjectionReport(PredicateTable(m, q), identity, lam)


# ---------------------------------------------------------------------------
# function graphs


def function_graph(M: FiniteStructure, f: FunctionTable) -> frozenset[tuple[int, ...]]:
    """The set of (input, output) tuples of f, as (n+m)-tuples."""
    return frozenset(a + out for a, out in f.table.items())


def compose_with_function(
    M: FiniteStructure, P: PredicateTable, f: FunctionTable
) -> PredicateTable:
    """The table (x, y) -> P(f(x), y); arity f.arity_in + (P.arity - f.arity_out)."""
    rest = P.arity - f.arity_out
    if rest < 0:
        raise DefinabilityError("P arity must cover the function output")
    values: dict[tuple[int, ...], Fraction] = {}
    for x in _tuples(M, f.arity_in):
        fx = f.table[x]
        for y in _tuples(M, rest):
            values[x + y] = P.values[fx + y]
    return PredicateTable(f.arity_in + rest, values)


@dataclass
class GraphIdentityReport:
    forward_holds: bool   # dist((x,y), graph) == min_u [d(x,u) + d(f(u), y)]
    backward_holds: bool  # d(f(x), y) == min_v [dist((x,v), graph) + d(v, y)]

    @property
    def ok(self) -> bool:
        return self.forward_holds and self.backward_holds

    def __bool__(self) -> bool:
        return self.ok


def check_graph_identities(M: FiniteStructure, f: FunctionTable) -> GraphIdentityReport:
    """Exact table check of the two distance-to-graph identities."""
    graph = function_graph(M, f)
    dist = distance_predicate(M, graph, f.arity_in + f.arity_out)
    xs = _tuples(M, f.arity_in)
    ys = _tuples(M, f.arity_out)
    forward = all(
        dist.values[x + y]
        == min(M.tuple_distance(x, u) + M.tuple_distance(f.table[u], y) for u in xs)
        for x in xs
        for y in ys
    )
    backward = all(
        M.tuple_distance(f.table[x], y)
        == min(dist.values[x + v] + M.tuple_distance(v, y) for v in ys)
        for x in xs
        for y in ys
    )
    return GraphIdentityReport(forward, backward)


# ---------------------------------------------------------------------------
# invariant types and automorphism invariance


def invariant_type(M: FiniteStructure, f: FunctionTable, family: FormulaFamily) -> TypeVector:
    """A 1-type fixed by pushing forward along a unary map.

    Canonical choice: iterate f from the lowest-index element until the
    orbit cycles, then take the uniform distribution on that terminal cycle.
    The cycle is f-invariant, so the distribution equals its own pushforward.
    """
    if f.arity_in != 1 or f.arity_out != 1:
        raise DefinabilityError("invariant_type needs a unary map on elements")
    if family.arity != 1:
        raise DefinabilityError("invariant_type works with 1-variable families")
    validate_function_table(M, f)
    seen: dict[int, int] = {}
    x = 0
    path: list[int] = []
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = f.table[(x,)][0]
    cycle = path[seen[x]:]
    w = Fraction(1, len(cycle))
    witness = {(c,): w for c in cycle}
    tables = [eval_table(M, phi, family.variables) for phi in family.formulas]
    values = tuple(
        sum((w * tbl[(c,)] for c in cycle), start=ZERO) for tbl in tables
    )
    return TypeVector(family, values, witness=witness, structure=M)


def pushforward(
    f: FunctionTable, witness: Mapping[tuple[int, ...], Fraction]
) -> dict[tuple[int, ...], Fraction]:
    """Image distribution of a witness under a unary map."""
    out: dict[tuple[int, ...], Fraction] = {}
    for (a,), w in witness.items():
        b = f.table[(a,)]
        out[b] = out.get(b, ZERO) + w
    return out


@dataclass
class InvarianceReport:
    invariant: bool
    witness: tuple | None = None  # (permutation, tuple) on failure

    def __bool__(self) -> bool:
        return self.invariant


def automorphism_invariant(M: FiniteStructure, P: PredicateTable) -> InvarianceReport:
    """Is P constant along the automorphism group's action on tuples?"""
    validate_predicate(M, P)
    for g in automorphisms(M):
        for a, v in P.values.items():
            moved = tuple(g[x] for x in a)
            if P.values[moved] != v:
                return InvarianceReport(False, (g, a))
    return InvarianceReport(True)
