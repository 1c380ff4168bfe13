import random
from fractions import Fraction as F

import pytest

from affinelogic.definability import (
    DefinabilityError,
    FunctionTable,
    PredicateTable,
    automorphism_invariant,
    check_distance_axioms,
    check_graph_identities,
    compose_with_function,
    distance_predicate,
    function_graph,
    inf_over_definable,
    invariant_type,
    is_definable_predicate,
    is_definable_set,
    lambda_domination,
    predicate_from_formula,
    pushforward,
    zeroset_recover,
)
from affinelogic.model import FiniteStructure, RelationInterp
from affinelogic.pra import build_algebra
from affinelogic.syntax import parse_formula
from affinelogic.typespace import FormulaFamily

ZERO = F(0)
ONE = F(1)


@pytest.fixture
def A2():
    """Probability algebra on two even atoms: elements 0, a, b, 1."""
    return build_algebra([F(1, 2), F(1, 2)]).to_structure()


def mu_family(M):
    return FormulaFamily(("x",), (parse_formula("mu(x)", M.signature()),))


# ---------------------------------------------------------------------------
# distance predicates and the axioms


def test_distance_predicate_frozen_values(A2):
    dist0 = distance_predicate(A2, {(0,)})
    assert [dist0.values[(x,)] for x in range(4)] == [0, F(1, 2), F(1, 2), 1]
    ends = distance_predicate(A2, {(0,), (3,)})
    assert [ends.values[(x,)] for x in range(4)] == [0, F(1, 2), F(1, 2), 0]


def test_distance_predicate_empty_set_is_constant_top(A2):
    dist = distance_predicate(A2, (), n=2)
    assert set(dist.values.values()) == {2 * A2.diameter()}
    with pytest.raises(DefinabilityError):
        distance_predicate(A2, ())  # empty needs an arity


def test_distance_predicate_rejects_mixed_arities(A2):
    with pytest.raises(DefinabilityError):
        distance_predicate(A2, {(0,), (0, 1)})


def test_distance_axioms_hold_for_distance_tables(A2):
    for D in ({(0,)}, {(1,), (2,)}, {(0, 3), (1, 2)}):
        rep = check_distance_axioms(A2, distance_predicate(A2, D))
        assert rep.ok


def test_shifted_distance_fails_approachability(A2):
    base = distance_predicate(A2, {(0,)})
    shifted = PredicateTable(1, {a: v + F(1, 10) for a, v in base.values.items()})
    rep = check_distance_axioms(A2, shifted)
    assert rep.nonnegative.ok and rep.nonexpansive.ok
    assert not rep.approachable.ok
    a, farkas = rep.approachable.witness
    assert all(r >= 0 for r in farkas)


def test_negative_value_fails_nonnegativity(A2):
    P = PredicateTable(1, {(x,): F(-1, 8) if x == 0 else ONE for x in range(4)})
    rep = check_distance_axioms(A2, P)
    assert not rep.nonnegative.ok
    assert rep.nonnegative.witness == ((0,),)


def test_steep_predicate_fails_nonexpansiveness(A2):
    P = PredicateTable(1, {(x,): ONE if x == 3 else ZERO for x in range(4)})
    rep = check_distance_axioms(A2, P)
    assert not rep.nonexpansive.ok
    a, b = rep.nonexpansive.witness
    assert P.values[a] - P.values[b] > A2.metric[a[0]][b[0]]


def test_zeroset_recover_roundtrip(A2):
    D = frozenset({(1,), (3,)})
    P = distance_predicate(A2, D)
    assert zeroset_recover(A2, P) == D


def test_zeroset_recover_refuses_non_distance(A2):
    base = distance_predicate(A2, {(0,)})
    shifted = PredicateTable(1, {a: v + F(1, 10) for a, v in base.values.items()})
    with pytest.raises(DefinabilityError):
        zeroset_recover(A2, shifted)


# ---------------------------------------------------------------------------
# domination


def test_domination_frozen(A2):
    P = distance_predicate(A2, {(0,)})
    Q = distance_predicate(A2, {(0,), (3,)})
    assert lambda_domination(A2, P, Q, ZERO).lam == 1
    assert lambda_domination(A2, P, Q, F(1, 4)).lam == F(1, 2)
    assert lambda_domination(A2, P, Q, ONE).lam == 0


def test_domination_zero_set_obstruction(A2):
    P = distance_predicate(A2, {(3,)})
    Q = distance_predicate(A2, {(0,)})
    res = lambda_domination(A2, P, Q, F(1, 100))
    assert not res.dominates
    assert res.witness == (3,)
    assert P.values[(3,)] == 0 and Q.values[(3,)] > 0


def test_domination_input_checks(A2):
    P = distance_predicate(A2, {(0,)})
    with pytest.raises(DefinabilityError):
        lambda_domination(A2, P, distance_predicate(A2, {(0, 0)}, 2), ZERO)
    with pytest.raises(DefinabilityError):
        lambda_domination(A2, P, P, F(-1))


# ---------------------------------------------------------------------------
# affine definability


def test_definable_predicate_tautology(A2):
    P = predicate_from_formula(A2, parse_formula("mu(x)", A2.signature()), ("x",))
    rep = is_definable_predicate(A2, P, mu_family(A2))
    assert rep.definable
    assert rep.witness.offset == 0
    assert rep.witness.coeffs == (ONE,)


def test_definable_predicate_affine_transform(A2):
    mu = A2.relations["mu"].table
    P = PredicateTable(1, {(x,): 2 * mu[(x,)] - 1 for x in range(4)})
    rep = is_definable_predicate(A2, P, mu_family(A2))
    assert rep.definable
    assert rep.witness.offset == -1
    assert rep.witness.coeffs == (F(2),)


def test_definable_predicate_conflict_between_atoms(A2):
    P = PredicateTable(1, {(x,): ONE if x == 1 else ZERO for x in range(4)})
    rep = is_definable_predicate(A2, P, mu_family(A2))
    assert not rep.definable
    assert rep.conflict is not None
    # the two atoms share the family vector (mu = 1/2) but P splits them
    assert {rep.conflict.key_a, rep.conflict.key_b} == {(1,), (2,)}


def test_definable_predicate_residue_when_not_affine(A2):
    mu = A2.relations["mu"].table
    P = PredicateTable(1, {(x,): mu[(x,)] ** 2 for x in range(4)})
    rep = is_definable_predicate(A2, P, mu_family(A2))
    assert not rep.definable
    assert rep.residue is not None


def test_definable_set(A2):
    rep = is_definable_set(A2, {(0,)}, mu_family(A2))
    assert rep.definable
    assert rep.witness.coeffs == (ONE,)
    bad = is_definable_set(A2, {(1,)}, mu_family(A2))
    assert not bad.definable
    assert bad.conflict is not None
    assert bad.distance.values[(1,)] == 0


# ---------------------------------------------------------------------------
# projections


def test_inf_over_definable_recovers_distance(A2):
    sig = A2.signature()
    P = predicate_from_formula(A2, parse_formula("d(x, y)", sig), ("x", "y"))
    rep = inf_over_definable(A2, {(0,)}, P, ONE)
    assert rep.identity_holds
    assert rep.table.values == distance_predicate(A2, {(0,)}).values


def test_inf_over_full_set_is_pointwise_min(A2):
    sig = A2.signature()
    P = predicate_from_formula(A2, parse_formula("d(x, y)", sig), ("x", "y"))
    rep = inf_over_definable(A2, {(y,) for y in range(4)}, P, ONE)
    assert rep.identity_holds
    assert set(rep.table.values.values()) == {ZERO}


def test_inf_over_definable_checks(A2):
    sig = A2.signature()
    P = predicate_from_formula(A2, parse_formula("d(x, y)", sig), ("x", "y"))
    with pytest.raises(DefinabilityError):
        inf_over_definable(A2, set(), P, ONE, n=1)
    with pytest.raises(DefinabilityError):
        inf_over_definable(A2, {(0,)}, P, F(-1))
    # lam = 0 demands a constant trailing block
    with pytest.raises(DefinabilityError, match="Lipschitz"):
        inf_over_definable(A2, {(0,)}, P, ZERO)


# ---------------------------------------------------------------------------
# function graphs


def test_compose_with_function_closure(A2):
    compl = FunctionTable(1, 1, ONE, {(x,): (x ^ 3,) for x in range(4)})
    P = predicate_from_formula(A2, parse_formula("mu(x)", A2.signature()), ("x",))
    comp = compose_with_function(A2, P, compl)
    rep = is_definable_predicate(A2, comp, mu_family(A2))
    assert rep.definable
    assert rep.witness.offset == 1
    assert rep.witness.coeffs == (F(-1),)


def test_graph_identities_for_nonexpansive_map(A2):
    compl = FunctionTable(1, 1, ONE, {(x,): (x ^ 3,) for x in range(4)})
    graph = function_graph(A2, compl)
    assert (0, 3) in graph and (3, 0) in graph
    rep = check_graph_identities(A2, compl)
    assert rep.forward_holds and rep.backward_holds


def test_backward_identity_fails_for_expansive_map():
    # three points nearly on a line; f stretches the left gap
    M = FiniteStructure(
        elements=("p", "q", "r"),
        metric=(
            (ZERO, F(1, 4), F(1, 2)),
            (F(1, 4), ZERO, F(1, 4)),
            (F(1, 2), F(1, 4), ZERO),
        ),
        constants={},
        functions={},
        relations={},
    )
    f = FunctionTable(1, 1, F(2), {(0,): (0,), (1,): (2,), (2,): (2,)})
    rep = check_graph_identities(M, f)
    assert rep.forward_holds
    assert not rep.backward_holds
    # the defect, concretely: d(f(0), 2) = 1/2, but routing through v = 2
    # pays only dist((0, 2), graph) + d(2, 2) = 1/4 — the graph point (1, 2)
    # sits 1/4 from (0, 2) while f stretches that gap to a full 1/2
    dist = distance_predicate(M, function_graph(M, f), 2)
    assert M.metric[f.table[(0,)][0]][2] == F(1, 2)
    assert dist.values[(0, 2)] == F(1, 4)
    assert min(dist.values[(0, v)] + M.metric[v][2] for v in range(3)) == F(1, 4)


# ---------------------------------------------------------------------------
# invariant types


def test_invariant_type_of_identity(A2):
    ident = FunctionTable(1, 1, ONE, {(x,): (x,) for x in range(4)})
    t = invariant_type(A2, ident, mu_family(A2))
    assert t.witness == {(0,): ONE}
    assert t.values == (ZERO,)


def test_invariant_type_of_swap():
    M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
    # swap the two atoms, fix 0 and 1: an automorphism of the algebra
    swap = FunctionTable(1, 1, ONE, {(0,): (0,), (1,): (2,), (2,): (1,), (3,): (3,)})
    t = invariant_type(M, swap, mu_family(M))
    assert t.witness == {(0,): ONE}  # the orbit of 0 is a fixed point
    push = pushforward(swap, t.witness)
    assert push == t.witness


def test_invariant_type_terminal_cycle():
    M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
    # 0 -> 1 -> 2 -> 1: the terminal cycle is {1, 2}
    f = FunctionTable(
        1, 1, F(2), {(0,): (1,), (1,): (2,), (2,): (1,), (3,): (3,)}
    )
    t = invariant_type(M, f, mu_family(M))
    assert t.witness == {(1,): F(1, 2), (2,): F(1, 2)}
    assert t.values == (F(1, 2),)
    assert pushforward(f, t.witness) == t.witness


def test_invariant_type_arity_checks(A2):
    binary = FunctionTable(2, 1, ONE, {})
    with pytest.raises(DefinabilityError):
        invariant_type(A2, binary, mu_family(A2))


def test_pushforward_merges_mass():
    f = FunctionTable(1, 1, ONE, {(0,): (2,), (1,): (2,), (2,): (2,)})
    out = pushforward(f, {(0,): F(1, 3), (1,): F(1, 3), (2,): F(1, 3)})
    assert out == {(2,): ONE}


# ---------------------------------------------------------------------------
# automorphism invariance


def test_automorphism_invariant_mu(A2):
    P = predicate_from_formula(A2, parse_formula("mu(x)", A2.signature()), ("x",))
    assert automorphism_invariant(A2, P).invariant


def test_automorphism_invariant_detects_atom_bias(A2):
    P = PredicateTable(1, {(x,): ONE if x == 1 else ZERO for x in range(4)})
    rep = automorphism_invariant(A2, P)
    assert not rep.invariant
    g, a = rep.witness
    assert P.values[tuple(g[x] for x in a)] != P.values[a]
