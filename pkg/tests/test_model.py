import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from affinelogic.model import (
    FiniteStructure,
    FunctionInterp,
    RelationInterp,
    apply_to_tuple,
    automorphisms,
    eval_condition,
    eval_formula,
    eval_table,
    validate_structure,
)
from affinelogic.pra import build_algebra
from affinelogic.sampling import random_formula, random_structure
from affinelogic.syntax import parse_condition, parse_formula, free_vars

ZERO = F(0)
ONE = F(1)


def two_point(d01=ONE):
    return FiniteStructure(
        elements=("a", "b"),
        metric=((ZERO, d01), (d01, ZERO)),
        constants={},
        functions={},
        relations={"R": RelationInterp(1, ONE, {(0,): ZERO, (1,): d01})},
    )


def test_validate_accepts_two_point():
    assert validate_structure(two_point()).ok


def test_validate_rejects_symmetry_violation():
    M = FiniteStructure(
        elements=("a", "b"),
        metric=((ZERO, F(1, 2)), (F(1, 3), ZERO)),
        constants={},
        functions={},
        relations={},
    )
    rep = validate_structure(M)
    assert not rep.ok
    assert rep.kind == "symmetry"


def test_validate_rejects_indiscernible_pair():
    M = FiniteStructure(
        elements=("a", "b"),
        metric=((ZERO, ZERO), (ZERO, ZERO)),
        constants={},
        functions={},
        relations={},
    )
    rep = validate_structure(M)
    assert not rep.ok
    assert rep.kind == "identity of indiscernibles"


def test_validate_rejects_triangle_violation():
    M = FiniteStructure(
        elements=("a", "b", "c"),
        metric=(
            (ZERO, F(1, 10), ONE),
            (F(1, 10), ZERO, F(1, 10)),
            (ONE, F(1, 10), ZERO),
        ),
        constants={},
        functions={},
        relations={},
    )
    rep = validate_structure(M)
    assert not rep.ok
    assert rep.kind == "triangle inequality"
    assert rep.witness is not None


def test_validate_rejects_relation_lipschitz_violation():
    M = FiniteStructure(
        elements=("a", "b"),
        metric=((ZERO, F(1, 4)), (F(1, 4), ZERO)),
        constants={},
        functions={},
        relations={"R": RelationInterp(1, ONE, {(0,): ZERO, (1,): ONE})},
    )
    rep = validate_structure(M)
    assert not rep.ok
    assert rep.kind == "relation Lipschitz"


def test_validate_rejects_incomplete_table():
    M = FiniteStructure(
        elements=("a", "b"),
        metric=((ZERO, ONE), (ONE, ZERO)),
        constants={},
        functions={},
        relations={"R": RelationInterp(1, ONE, {(0,): ZERO})},
    )
    rep = validate_structure(M)
    assert not rep.ok
    assert rep.kind == "shape"


def test_validate_rejects_function_lipschitz_violation():
    M = FiniteStructure(
        elements=("a", "b", "c"),
        metric=(
            (ZERO, F(1, 4), F(1, 2)),
            (F(1, 4), ZERO, F(1, 4)),
            (F(1, 2), F(1, 4), ZERO),
        ),
        constants={},
        functions={"f": FunctionInterp(1, ONE, {(0,): 0, (1,): 2, (2,): 2})},
        relations={},
    )
    rep = validate_structure(M)
    assert not rep.ok
    assert rep.kind == "function Lipschitz"


def test_constants_out_of_range_is_shape_error():
    M = FiniteStructure(
        elements=("a",),
        metric=((ZERO,),),
        constants={"c": 3},
        functions={},
        relations={},
    )
    assert validate_structure(M).kind == "shape"


# ---------------------------------------------------------------------------
# evaluation


@pytest.fixture
def algebra_structure():
    return build_algebra([F(1, 2), F(1, 3), F(1, 6)]).to_structure()


def test_eval_formula_examples(algebra_structure):
    M = algebra_structure
    sig = M.signature()
    assert eval_formula(M, parse_formula("sup x. mu(x)", sig)) == 1
    assert eval_formula(M, parse_formula("inf x. mu(x)", sig)) == 0
    phi = parse_formula("1/2 * mu(x) + 1/2 * mu(x)", sig)
    for i in range(M.size):
        assert eval_formula(M, phi, {"x": i}) == M.relations["mu"].table[(i,)]


def test_eval_formula_requires_assignment(algebra_structure):
    M = algebra_structure
    phi = parse_formula("mu(x)", M.signature())
    with pytest.raises(Exception):
        eval_formula(M, phi, {})


def test_eval_condition(algebra_structure):
    M = algebra_structure
    sig = M.signature()
    cond = parse_condition("mu(x) <= 1/2 * 1", sig)
    assert eval_condition(M, cond, {"x": 0})
    assert not eval_condition(M, cond, {"x": M.size - 1})


def test_eval_table_matches_pointwise_eval(algebra_structure):
    M = algebra_structure
    sig = M.signature()
    rng = random.Random(11)
    for _ in range(25):
        phi = random_formula(rng, sig, ("x", "y"), depth=3, quantifiers=2)
        fv = tuple(sorted(free_vars(phi)))
        tbl = eval_table(M, phi, fv)
        for a in itertools.product(range(M.size), repeat=len(fv)):
            assert tbl[a] == eval_formula(M, phi, dict(zip(fv, a)))


def test_eval_table_variable_order_expansion(algebra_structure):
    M = algebra_structure
    sig = M.signature()
    phi = parse_formula("mu(x)", sig)
    tbl = eval_table(M, phi, ("y", "x"))
    for y in range(M.size):
        for x in range(M.size):
            assert tbl[(y, x)] == M.relations["mu"].table[(x,)]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_structures_validate(seed):
    rng = random.Random(seed)
    M = random_structure(rng, max_size=4)
    assert validate_structure(M).ok


# ---------------------------------------------------------------------------
# automorphisms


def test_automorphisms_of_symmetric_algebra():
    M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
    perms = automorphisms(M)
    # identity and the atom swap; 0 and top are named constants so they stay put
    assert len(perms) == 2
    swap = next(p for p in perms if p != tuple(range(M.size)))
    assert swap[0] == 0 and swap[3] == 3
    assert swap[1] == 2 and swap[2] == 1


def test_automorphisms_of_asymmetric_algebra_is_trivial():
    M = build_algebra([F(1, 3), F(2, 3)]).to_structure()
    assert automorphisms(M) == [tuple(range(M.size))]


def test_automorphisms_respect_relations():
    M = two_point()
    # R separates the two points even though the metric does not
    assert automorphisms(M) == [(0, 1)]


def test_automorphism_preserves_formula_values():
    M = build_algebra([F(1, 4), F(1, 4), F(1, 2)]).to_structure()
    sig = M.signature()
    rng = random.Random(5)
    perms = automorphisms(M)
    assert len(perms) >= 2
    for _ in range(10):
        phi = random_formula(rng, sig, ("x",), depth=3, quantifiers=1)
        fv = tuple(sorted(free_vars(phi)))
        tbl = eval_table(M, phi, fv)
        for perm in perms:
            for a in tbl:
                assert tbl[apply_to_tuple(perm, a)] == tbl[a]


def test_first_order_flag():
    # a one-atom algebra is {0, 1}-valued everywhere, hence first order
    assert build_algebra([ONE]).to_structure().is_first_order()
    # a three-atom algebra has mu values strictly between 0 and 1
    assert not build_algebra([F(1, 3), F(1, 3), F(1, 3)]).to_structure().is_first_order()
    rng = random.Random(0)
    from affinelogic.sampling import random_first_order_structure

    N = random_first_order_structure(rng, 3)
    assert N.is_first_order()
