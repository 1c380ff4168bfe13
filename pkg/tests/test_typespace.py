import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from affinelogic.model import FiniteStructure, RelationInterp, eval_table
from affinelogic.pra import build_algebra
from affinelogic.sampling import random_hull_structure
from affinelogic.syntax import parse_condition, parse_condition_line, parse_formula
from affinelogic.typespace import (
    BoundaryMeasure,
    DecompositionError,
    FormulaFamily,
    NotAffineError,
    TypespaceError,
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

ZERO = F(0)
ONE = F(1)


def fo_structure(patterns, d=ONE):
    """Discrete structure with one unary 0/1 relation per coordinate."""
    m = len(patterns)
    k = len(patterns[0])
    metric = tuple(
        tuple(ZERO if i == j else d for j in range(m)) for i in range(m)
    )
    relations = {
        f"R{c}": RelationInterp(1, ONE, {(i,): F(patterns[i][c]) for i in range(m)})
        for c in range(k)
    }
    return FiniteStructure(
        elements=tuple(f"e{i}" for i in range(m)),
        metric=metric,
        constants={},
        functions={},
        relations=relations,
    )


@pytest.fixture
def algebra_hull():
    M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
    family = FormulaFamily(("x",), (parse_formula("mu(x)", M.signature()),))
    return type_hull(M, 1, family)


def test_family_validation():
    M = build_algebra([ONE]).to_structure()
    sig = M.signature()
    with pytest.raises(TypespaceError):
        FormulaFamily(("x", "x"), ())
    with pytest.raises(TypespaceError):
        FormulaFamily(("x",), (parse_formula("mu(y)", sig),))


def test_hull_deduplicates_and_tracks_realizations(algebra_hull):
    hull = algebra_hull
    # mu takes the values 0, 1/2, 1/2, 1 over the four algebra elements
    assert sorted(v.values[0] for v in hull.vertices) == [0, F(1, 2), 1]
    half = next(i for i, v in enumerate(hull.vertices) if v.values[0] == F(1, 2))
    assert len(hull.realizations[half]) == 2
    assert not hull.first_order


def test_hull_cap():
    M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
    family = FormulaFamily(
        ("x", "y"), (parse_formula("d(x, y)", M.signature()),)
    )
    with pytest.raises(TypespaceError):
        type_hull(M, 2, family, cap=15)
    with pytest.raises(TypespaceError):
        type_hull(M, 1, family)  # arity mismatch


def test_realized_and_mixture_types(algebra_hull):
    hull = algebra_hull
    M, family = hull.structure, hull.family
    bottom = realized_type(M, (0,), family)
    top = realized_type(M, (3,), family)
    assert bottom.values == (ZERO,)
    assert top.values == (ONE,)
    mix = mixture_type([bottom, top], [F(1, 4), F(3, 4)])
    assert mix.values == (F(3, 4),)
    assert mix.witness == {(0,): F(1, 4), (3,): F(3, 4)}
    with pytest.raises(TypespaceError):
        mixture_type([bottom, top], [F(1, 2), F(1, 4)])
    with pytest.raises(TypespaceError):
        mixture_type([bottom, top], [F(3, 2), F(-1, 2)])


def test_extreme_points_with_certificates(algebra_hull):
    hull = algebra_hull
    report = extreme_points(hull)
    by_value = {hull.vertices[i].values[0]: i for i in range(len(hull))}
    assert set(report.extreme_indices) == {by_value[ZERO], by_value[ONE]}
    # separating functionals: positive at their vertex, nonpositive elsewhere
    for ev in report.extreme:
        for i, v in enumerate(hull.vertices):
            score = ev.offset + sum(c * x for c, x in zip(ev.coeffs, v.values))
            if i == ev.index:
                assert score > 0
            else:
                assert score <= 0
    # the middle vertex decomposes as an even mixture of the endpoints
    (ne,) = report.non_extreme
    assert ne.index == by_value[F(1, 2)]
    assert ne.weights == {by_value[ZERO]: F(1, 2), by_value[ONE]: F(1, 2)}


def test_exposed_face_of_mu(algebra_hull):
    hull = algebra_hull
    M = hull.structure
    table = eval_table(M, parse_formula("mu(x)", M.signature()), ("x",))
    face = exposed_face(hull, table, maximize=True)
    assert not face.entire_space
    assert face.optimum == 1
    assert [hull.vertices[i].values[0] for i in face.vertex_indices] == [ONE]
    floor = exposed_face(hull, table)
    assert floor.optimum == 0


def test_exposed_face_constant_functional_flags_entire_space(algebra_hull):
    hull = algebra_hull
    table = {(i,): F(1, 3) for i in range(hull.structure.size)}
    face = exposed_face(hull, table)
    assert face.entire_space
    assert face.vertex_indices == tuple(range(len(hull)))


def test_exposed_face_rejects_non_affine_table(algebra_hull):
    hull = algebra_hull
    M = hull.structure
    mu = M.relations["mu"].table
    square = {(i,): mu[(i,)] ** 2 for i in range(M.size)}
    with pytest.raises(NotAffineError):
        exposed_face(hull, square)
    # same family values, different table values: a conflict certificate
    conflict = dict(square)
    conflict[(1,)] = ZERO
    conflict[(2,)] = ONE  # mu is 1/2 at both atoms
    with pytest.raises(NotAffineError):
        exposed_face(hull, conflict)


def test_is_face_accepts_exposed_cut(algebra_hull):
    hull = algebra_hull
    sig = hull.structure.signature()
    rep = is_face(hull, [parse_condition("mu(x) <= 0 * 1", sig)])
    assert rep.is_face
    assert [hull.vertices[i].values[0] for i in rep.cut_vertex_indices] == [ZERO]


def test_is_face_empty_condition_set_is_whole_hull(algebra_hull):
    rep = is_face(algebra_hull, [])
    assert rep.is_face
    assert rep.cut_vertex_indices == tuple(range(len(algebra_hull)))


def test_is_face_rejects_interior_slice(algebra_hull):
    hull = algebra_hull
    sig = hull.structure.signature()
    conds = parse_condition_line("mu(x) = 1/2 * 1", sig)
    rep = is_face(hull, conds)
    assert not rep.is_face
    v = rep.violation
    assert v is not None
    assert v.inside == (F(1, 2),)
    assert v.gamma == F(1, 2)
    # the violating endpoint really leaves the cut
    c0, cs = None, None
    from affinelogic.typespace import condition_functionals

    fns = condition_functionals(hull, conds)
    c0, cs = fns[v.functional_index]
    assert c0 + sum(c * x for c, x in zip(cs, v.endpoint)) < 0
    mid = tuple(
        v.gamma * e + (1 - v.gamma) * p for e, p in zip(v.endpoint, v.partner)
    )
    assert mid == v.inside


def test_condition_with_stray_variable_rejected(algebra_hull):
    sig = algebra_hull.structure.signature()
    with pytest.raises(TypespaceError):
        is_face(algebra_hull, [parse_condition("mu(y) <= 1", sig)])


def test_affine_satisfiable_frozen_split():
    M = build_algebra([ONE]).to_structure()
    sig = M.signature()
    conds = parse_condition_line("mu(x) = 1/2 * 1", sig)
    res = affine_satisfiable(M, conds)
    assert res.satisfiable
    assert res.witness == {(0,): F(1, 2), (1,): F(1, 2)}


def test_affine_satisfiable_refutation_certificate():
    M = build_algebra([ONE]).to_structure()
    sig = M.signature()
    conds = [
        parse_condition("1 <= mu(x)", sig),
        parse_condition("mu(x) <= 0 * 1", sig),
    ]
    res = affine_satisfiable(M, conds)
    assert not res.satisfiable
    assert res.margin is not None and res.margin < 0
    assert all(r >= 0 for r in res.farkas)
    # re-check the certificate: the combined gap is negative at every element
    gaps = []
    for cond in conds:
        lhs = eval_table(M, cond.lhs, ("x",))
        rhs = eval_table(M, cond.rhs, ("x",))
        gaps.append({a: rhs[a] - lhs[a] for a in lhs})
    for a in gaps[0]:
        assert sum(r * g[a] for r, g in zip(res.farkas, gaps)) <= res.margin


def test_affine_satisfiable_empty_conditions():
    M = build_algebra([ONE]).to_structure()
    res = affine_satisfiable(M, [], variables=("x",))
    assert res.satisfiable


def test_boundary_measure_validation():
    with pytest.raises(TypespaceError):
        BoundaryMeasure({0: F(1, 2)})
    with pytest.raises(TypespaceError):
        BoundaryMeasure({0: F(3, 2), 1: F(-1, 2)})
    m = BoundaryMeasure({0: ONE, 1: ZERO})
    assert m.weights == {0: ONE}


def test_barycenter_and_keisler_roundtrip():
    M = fo_structure([(0, 0), (1, 0), (0, 1)])
    sig = M.signature()
    family = FormulaFamily(
        ("x",), tuple(parse_formula(f"R{c}(x)", sig) for c in range(2))
    )
    hull = type_hull(M, 1, family)
    assert hull.first_order
    assert len(hull) == 3
    report = extreme_points(hull)
    assert set(report.extreme_indices) == {0, 1, 2}

    measure = BoundaryMeasure({0: F(1, 2), 1: F(1, 4), 2: F(1, 4)})
    p = barycenter(hull, measure)
    assert p.values == (F(1, 4), F(1, 4))
    back = keisler_decompose(hull, p)
    assert back.weights == measure.weights


def test_barycenter_rejects_weight_on_non_extreme():
    M = build_algebra([F(1, 2), F(1, 2)]).to_structure()
    family = FormulaFamily(("x",), (parse_formula("mu(x)", M.signature()),))
    hull = type_hull(M, 1, family)
    half = next(i for i, v in enumerate(hull.vertices) if v.values[0] == F(1, 2))
    with pytest.raises(TypespaceError):
        barycenter(hull, BoundaryMeasure({half: ONE}))


def test_keisler_requires_first_order(algebra_hull):
    p = algebra_hull.vertices[0]
    with pytest.raises(DecompositionError):
        keisler_decompose(algebra_hull, p)


def test_keisler_rejects_dependent_extremes():
    M = fo_structure([(0, 0), (1, 0), (0, 1), (1, 1)])
    sig = M.signature()
    family = FormulaFamily(
        ("x",), tuple(parse_formula(f"R{c}(x)", sig) for c in range(2))
    )
    hull = type_hull(M, 1, family)
    with pytest.raises(DecompositionError, match="dependent"):
        keisler_decompose(hull, hull.vertices[0])


def test_keisler_rejects_points_outside():
    M = fo_structure([(0, 0), (1, 0), (0, 1)])
    sig = M.signature()
    family = FormulaFamily(
        ("x",), tuple(parse_formula(f"R{c}(x)", sig) for c in range(2))
    )
    hull = type_hull(M, 1, family)
    from affinelogic.typespace import TypeVector

    outside = TypeVector(family, (F(2), ZERO))
    with pytest.raises(DecompositionError, match="outside the hull"):
        keisler_decompose(hull, outside)

    # two extremes spanning a line inside a 2-dimensional family
    N = fo_structure([(0, 0), (1, 0)])
    hull2 = type_hull(N, 1, FormulaFamily(
        ("x",), tuple(parse_formula(f"R{c}(x)", N.signature()) for c in range(2))
    ))
    off_line = TypeVector(hull2.family, (ZERO, ONE))
    with pytest.raises(DecompositionError, match="affine hull"):
        keisler_decompose(hull2, off_line)


def test_type_distance_frozen():
    M = fo_structure([(0,), (1,)])
    family = FormulaFamily(("x",), (parse_formula("R0(x)", M.signature()),))
    p = realized_type(M, (0,), family)
    q = realized_type(M, (1,), family)
    assert type_distance(p, p) == 0
    assert type_distance(p, q) == 1
    mix = mixture_type([p, q], [F(1, 2), F(1, 2)])
    assert type_distance(p, mix) == F(1, 2)
    assert type_distance(mix, q) == F(1, 2)


def test_type_distance_requires_witnesses():
    M = fo_structure([(0,), (1,)])
    family = FormulaFamily(("x",), (parse_formula("R0(x)", M.signature()),))
    from affinelogic.typespace import TypeVector

    bare = TypeVector(family, (F(1, 2),))
    p = realized_type(M, (0,), family)
    with pytest.raises(TypespaceError):
        type_distance(p, bare)


def test_type_distance_triangle_and_symmetry_random():
    rng = random.Random(9)
    M = random_hull_structure(rng, n_vertices=4, n_coords=2)
    sig = M.signature()
    family = FormulaFamily(
        ("x",), tuple(parse_formula(f"R{c}(x)", sig) for c in range(2))
    )
    pts = [realized_type(M, (i,), family) for i in range(M.size)]
    mixes = [
        mixture_type([pts[0], pts[1]], [F(1, 3), F(2, 3)]),
        mixture_type([pts[2], pts[3]], [F(1, 2), F(1, 2)]),
        pts[0],
    ]
    for a in mixes:
        for b in mixes:
            dab = type_distance(a, b)
            assert dab == type_distance(b, a)
            assert dab >= 0
            for c in mixes:
                assert type_distance(a, c) <= dab + type_distance(b, c)
