"""Command-line front door: file loading, dispatch, structured reports.

Exit codes: 0 for success or a check that comes back true, 1 for a check
that comes back false (the witness is in the report), 2 for usage errors,
unreadable files, or validation failures.  With --json the report is a
machine-readable object whose rationals are exact "p/q" strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .definability import (
    DefinabilityError,
    automorphism_invariant,
    check_distance_axioms,
    inf_over_definable,
    invariant_type,
    is_definable_predicate,
    is_definable_set,
    lambda_domination,
    zeroset_recover,
)
from .mean import MeanError, Ultracharge, build_ultramean, check_ultramean_identity
from .model import (
    EvalError,
    FiniteStructure,
    StructureError,
    automorphisms,
    eval_formula,
    validate_structure,
)
from .pra import (
    AdditiveFunction,
    AlgebraError,
    MeasureAlgebra,
    build_algebra,
    dcl,
    hahn_max_set,
    interval_distance,
    interval_projection,
    pra_definable_check,
)
from .rationals import format_rational, parse_rational
from .serialize import (
    FormatError,
    load_family,
    load_function_table,
    load_predicate,
    load_structure,
    save_structure,
)
from .suites import SUITES, run_suites
from .syntax import FormulaError, Signature, certificate, free_vars, parse_condition, parse_formula, render
from .typespace import (
    BoundaryMeasure,
    DecompositionError,
    NotAffineError,
    TypespaceError,
    TypeVector,
    affine_satisfiable,
    barycenter,
    exposed_face,
    extreme_points,
    is_face,
    keisler_decompose,
    realized_type,
    type_distance,
    type_hull,
)

USAGE_ERROR = 2
CHECK_FALSE = 1
OK = 0


class CliError(Exception):
    """Usage-level problem: bad flag combination, unparsable argument."""


# ---------------------------------------------------------------------------
# argument decoding helpers


def _fractions(text: str) -> list[Fraction]:
    return [parse_rational(part) for part in text.split(",") if part.strip()]


def _element(M: FiniteStructure, text: str) -> int:
    text = text.strip()
    if text in M.elements:
        return M.element_index(text)
    try:
        idx = int(text)
    except ValueError:
        raise CliError(f"unknown element {text!r}") from None
    if not 0 <= idx < M.size:
        raise CliError(f"element index {idx} out of range")
    return idx


def _tuple_of(M: FiniteStructure, text: str) -> tuple[int, ...]:
    return tuple(_element(M, part) for part in text.split(",") if part.strip())


def _tuple_set(M: FiniteStructure, text: str) -> frozenset[tuple[int, ...]]:
    out = set()
    for chunk in text.split(";"):
        if chunk.strip():
            out.add(_tuple_of(M, chunk))
    if not out:
        raise CliError("expected a nonempty set of tuples")
    return frozenset(out)


def _assignment(M: FiniteStructure, pairs: list[str] | None) -> dict[str, int]:
    asg = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise CliError(f"--assign expects NAME=ELEMENT, got {pair!r}")
        name, value = pair.split("=", 1)
        asg[name.strip()] = _element(M, value)
    return asg


def _algebra_element(A: MeasureAlgebra, text: str) -> int:
    text = text.strip()
    if set(text) <= {"0", "1"} and len(text) == A.k:
        return A.from_label(text)
    try:
        x = int(text)
    except ValueError:
        raise CliError(f"bad algebra element {text!r}") from None
    if not 0 <= x < A.size:
        raise CliError(f"algebra element {x} out of range")
    return x


def _signature_for(args) -> Signature:
    if getattr(args, "structure", None):
        return load_structure(args.structure).signature()
    return Signature.make()


def _load_hull(args):
    M = load_structure(args.structure)
    family = load_family(args.family, M.signature(), _vars(args))
    hull = type_hull(M, family.arity, family, cap=args.cap)
    return M, family, hull


def _vars(args) -> tuple[str, ...] | None:
    raw = getattr(args, "vars", None)
    if raw is None:
        return None
    return tuple(v.strip() for v in raw.split(",") if v.strip())


def _fmt(value: Fraction) -> str:
    return format_rational(value)


def _emit(args, report: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _witness_obj(M: FiniteStructure, witness) -> dict:
    return {
        ",".join(M.elements[i] for i in a): _fmt(w) for a, w in sorted(witness.items())
    }


def _labels(M: FiniteStructure, a) -> str:
    return "(" + ",".join(M.elements[i] for i in a) + ")"


# ---------------------------------------------------------------------------
# formula-level commands


def cmd_parse(args) -> int:
    sig = _signature_for(args)
    phi = parse_formula(args.formula, sig)
    fv = sorted(free_vars(phi))
    _emit(args, {"formula": render(phi), "free_variables": fv},
          [render(phi), f"free variables: {', '.join(fv) if fv else '(none)'}"])
    return OK


def cmd_cert(args) -> int:
    sig = _signature_for(args)
    phi = parse_formula(args.formula, sig)
    cert = certificate(phi, sig)
    _emit(args, {"formula": render(phi), "lam": _fmt(cert.lam), "bound": _fmt(cert.bound)},
          [f"lam = {_fmt(cert.lam)}", f"bound = {_fmt(cert.bound)}"])
    return OK


def cmd_eval(args) -> int:
    M = load_structure(args.structure)
    phi = parse_formula(args.formula, M.signature())
    asg = _assignment(M, args.assign)
    value = eval_formula(M, phi, asg)
    _emit(args, {"value": _fmt(value)}, [_fmt(value)])
    return OK


def cmd_automorphisms(args) -> int:
    M = load_structure(args.structure)
    perms = automorphisms(M)
    lines = [f"{len(perms)} automorphisms"]
    for perm in perms:
        lines.append("  " + " ".join(f"{M.elements[i]}->{M.elements[j]}" for i, j in enumerate(perm)))
    _emit(args, {"count": len(perms), "permutations": [list(p) for p in perms]}, lines)
    return OK


# ---------------------------------------------------------------------------
# ultramean commands


def _mean_inputs(args):
    structures = [load_structure(path) for path in args.structure]
    mu = Ultracharge(_fractions(args.mu))
    if len(mu) != len(structures):
        raise CliError("--mu must list one weight per structure")
    return structures, mu


def cmd_ultramean_build(args) -> int:
    structures, mu = _mean_inputs(args)
    mean = build_ultramean(structures, mu, cap=args.cap)
    report = {
        "classes": mean.structure.size,
        "support": list(mean.support),
        "elements": list(mean.structure.elements),
    }
    lines = [f"{mean.structure.size} classes over support {list(mean.support)}"]
    if args.out:
        save_structure(mean.structure, args.out)
        report["out"] = args.out
        lines.append(f"wrote {args.out}")
    _emit(args, report, lines)
    return OK


def cmd_ultramean_verify(args) -> int:
    structures, mu = _mean_inputs(args)
    sig = structures[0].signature()
    phi = parse_formula(args.formula, sig)
    raw_tuples: dict[str, tuple[int, ...]] = {}
    for pair in args.assign or []:
        if "=" not in pair:
            raise CliError(f"--assign expects NAME=i,j,..., got {pair!r}")
        name, value = pair.split("=", 1)
        parts = [p for p in value.split(",") if p.strip()]
        if len(parts) != len(structures):
            raise CliError(f"assignment for {name!r} needs one element per factor")
        raw_tuples[name.strip()] = tuple(
            _element(M, p) for M, p in zip(structures, parts)
        )
    report = check_ultramean_identity(structures, mu, phi, raw_tuples)
    payload = {
        "quotient": _fmt(report.quotient_value),
        "integral": _fmt(report.integral_value),
        "equal": report.equal,
    }
    lines = [
        f"quotient side: {_fmt(report.quotient_value)}",
        f"integral side: {_fmt(report.integral_value)}",
        "equal" if report.equal else "NOT EQUAL",
    ]
    _emit(args, payload, lines)
    return OK if report.equal else CHECK_FALSE


# ---------------------------------------------------------------------------
# type-space commands


def cmd_types_hull(args) -> int:
    M, family, hull = _load_hull(args)
    lines = [f"{len(hull)} realized type vectors over {len(family)} formulas"]
    vertices = []
    for i, v in enumerate(hull.vertices):
        vals = "(" + ", ".join(_fmt(x) for x in v.values) + ")"
        reals = " ".join(_labels(M, a) for a in hull.realizations[i])
        lines.append(f"  [{i}] {vals} realized by {reals}")
        vertices.append({
            "values": [_fmt(x) for x in v.values],
            "realizations": [[M.elements[i_] for i_ in a] for a in hull.realizations[i]],
        })
    _emit(args, {"vertices": vertices, "first_order": hull.first_order}, lines)
    return OK


def cmd_types_extreme(args) -> int:
    M, family, hull = _load_hull(args)
    rep = extreme_points(hull)
    lines = [f"{len(rep.extreme)} extreme / {len(hull)} vertices"]
    payload = {"extreme": [], "non_extreme": []}
    for ev in rep.extreme:
        vals = "(" + ", ".join(_fmt(x) for x in hull.vertices[ev.index].values) + ")"
        lines.append(
            f"  [{ev.index}] {vals} extreme; functional offset {_fmt(ev.offset)}, "
            f"coeffs ({', '.join(_fmt(c) for c in ev.coeffs)})"
        )
        payload["extreme"].append({
            "index": ev.index,
            "offset": _fmt(ev.offset),
            "coeffs": [_fmt(c) for c in ev.coeffs],
        })
    for nv in rep.non_extreme:
        mix = ", ".join(f"{j}:{_fmt(w)}" for j, w in sorted(nv.weights.items()))
        lines.append(f"  [{nv.index}] non-extreme = mix {{{mix}}}")
        payload["non_extreme"].append({
            "index": nv.index,
            "weights": {str(j): _fmt(w) for j, w in nv.weights.items()},
        })
    _emit(args, payload, lines)
    return OK


def cmd_types_face(args) -> int:
    M, family, hull = _load_hull(args)
    P = load_predicate(args.predicate)
    face = exposed_face(hull, P.values, maximize=args.max)
    goal = "max" if args.max else "min"
    if face.entire_space:
        lines = [f"functional is constant; the {goal}-face is the entire space"]
    else:
        lines = [
            f"{goal} value {_fmt(face.optimum)} attained at vertices "
            f"{list(face.vertex_indices)}"
        ]
    payload = {
        "entire_space": face.entire_space,
        "vertices": list(face.vertex_indices),
        "optimum": _fmt(face.optimum),
        "offset": _fmt(face.offset),
        "coeffs": [_fmt(c) for c in face.coeffs],
    }
    _emit(args, payload, lines)
    return OK


def cmd_types_facial(args) -> int:
    M, family, hull = _load_hull(args)
    sig = M.signature()
    conditions = [parse_condition(text, sig) for text in args.condition]
    rep = is_face(hull, conditions)
    payload = {"is_face": rep.is_face, "cut_vertices": list(rep.cut_vertex_indices)}
    lines = [
        ("face" if rep.is_face else "NOT a face")
        + f"; cut contains vertices {list(rep.cut_vertex_indices)}"
    ]
    if rep.violation is not None:
        v = rep.violation
        lines.append(
            f"  violation: gamma={_fmt(v.gamma)} mix of "
            f"({', '.join(_fmt(x) for x in v.endpoint)}) and "
            f"({', '.join(_fmt(x) for x in v.partner)}) lies in the cut, "
            f"endpoint fails condition {v.functional_index}"
        )
        payload["violation"] = {
            "gamma": _fmt(v.gamma),
            "inside": [_fmt(x) for x in v.inside],
            "endpoint": [_fmt(x) for x in v.endpoint],
            "partner": [_fmt(x) for x in v.partner],
            "condition": v.functional_index,
        }
    _emit(args, payload, lines)
    return OK if rep.is_face else CHECK_FALSE


def cmd_types_satisfiable(args) -> int:
    M = load_structure(args.structure)
    sig = M.signature()
    conditions = [parse_condition(text, sig) for text in args.condition]
    res = affine_satisfiable(M, conditions, _vars(args), cap=args.cap)
    if res.satisfiable:
        assert res.witness is not None
        payload = {"satisfiable": True, "witness": _witness_obj(M, res.witness)}
        mix = ", ".join(
            f"{_labels(M, a)}:{_fmt(w)}" for a, w in sorted(res.witness.items())
        )
        _emit(args, payload, [f"satisfiable by mixture {{{mix}}}"])
        return OK
    assert res.farkas is not None
    payload = {
        "satisfiable": False,
        "farkas": [_fmt(c) for c in res.farkas],
        "margin": _fmt(res.margin),
    }
    lines = [
        "refuted: nonnegative combination "
        f"({', '.join(_fmt(c) for c in res.farkas)}) has margin {_fmt(res.margin)} < 0"
    ]
    _emit(args, payload, lines)
    return CHECK_FALSE


def _measure_arg(text: str) -> dict[int, Fraction]:
    weights = {}
    for pair in text.split(","):
        if not pair.strip():
            continue
        if "=" not in pair:
            raise CliError(f"--weights expects INDEX=p/q, got {pair!r}")
        idx, w = pair.split("=", 1)
        weights[int(idx)] = parse_rational(w)
    return weights


def cmd_types_barycenter(args) -> int:
    M, family, hull = _load_hull(args)
    measure = BoundaryMeasure(_measure_arg(args.weights))
    p = barycenter(hull, measure)
    payload = {"values": [_fmt(x) for x in p.values]}
    _emit(args, payload, ["(" + ", ".join(_fmt(x) for x in p.values) + ")"])
    return OK


def cmd_types_keisler(args) -> int:
    M, family, hull = _load_hull(args)
    if (args.point is None) == (args.values is None):
        raise CliError("give exactly one of --point or --values")
    if args.point is not None:
        p = realized_type(M, _tuple_of(M, args.point), family)
    else:
        values = tuple(_fractions(args.values))
        if len(values) != len(family):
            raise CliError("--values must list one rational per family formula")
        p = TypeVector(family, values, witness=None, structure=M)
    measure = keisler_decompose(hull, p)
    payload = {"weights": {str(i): _fmt(w) for i, w in sorted(measure.weights.items())}}
    lines = ["boundary measure:"]
    for i, w in sorted(measure.weights.items()):
        reals = " ".join(_labels(M, a) for a in hull.realizations[i])
        lines.append(f"  vertex {i} ({reals}): {_fmt(w)}")
    _emit(args, payload, lines)
    return OK


def cmd_types_distance(args) -> int:
    M, family, hull = _load_hull(args)
    p = realized_type(M, _tuple_of(M, args.left), family)
    q = realized_type(M, _tuple_of(M, args.right), family)
    value = type_distance(p, q)
    _emit(args, {"distance": _fmt(value)}, [_fmt(value)])
    return OK


# ---------------------------------------------------------------------------
# definability commands


def cmd_def_distance_axioms(args) -> int:
    M = load_structure(args.structure)
    P = load_predicate(args.predicate)
    rep = check_distance_axioms(M, P)
    payload, lines = {}, []
    for label, check in (
        ("nonnegative", rep.nonnegative),
        ("nonexpansive", rep.nonexpansive),
        ("approachable", rep.approachable),
    ):
        payload[label] = {"ok": check.ok}
        line = f"{label}: {'ok' if check.ok else 'FAIL'}"
        if not check.ok and check.witness is not None:
            payload[label]["witness"] = repr(check.witness)
            line += f" at {check.witness}"
        lines.append(line)
    _emit(args, payload, lines)
    return OK if rep.ok else CHECK_FALSE


def cmd_def_recover(args) -> int:
    M = load_structure(args.structure)
    P = load_predicate(args.predicate)
    try:
        zero = zeroset_recover(M, P)
    except DefinabilityError as exc:
        _emit(args, {"recovered": None, "error": str(exc)}, [f"refused: {exc}"])
        return CHECK_FALSE
    tuples = sorted(zero)
    payload = {"zero_set": [[M.elements[i] for i in a] for a in tuples]}
    lines = ["zero set: " + " ".join(_labels(M, a) for a in tuples)]
    _emit(args, payload, lines)
    return OK


def cmd_def_domination(args) -> int:
    M = load_structure(args.structure)
    P = load_predicate(args.lower)
    Q = load_predicate(args.upper)
    res = lambda_domination(M, P, Q, parse_rational(args.eps))
    if res.dominates:
        assert res.lam is not None
        _emit(args, {"dominates": True, "lam": _fmt(res.lam)},
              [f"lam = {_fmt(res.lam)}"])
        return OK
    assert res.witness is not None
    payload = {"dominates": False, "witness": [M.elements[i] for i in res.witness]}
    _emit(args, payload,
          [f"no lam works: at {_labels(M, res.witness)} P = 0 < Q"])
    return CHECK_FALSE


def cmd_def_predicate(args) -> int:
    M = load_structure(args.structure)
    P = load_predicate(args.predicate)
    family = load_family(args.family, M.signature(), _vars(args))
    rep = is_definable_predicate(M, P, family)
    return _emit_definability(args, M, rep)


def _emit_definability(args, M: FiniteStructure, rep) -> int:
    if rep.definable:
        w = rep.witness
        payload = {
            "definable": True,
            "offset": _fmt(w.offset),
            "coeffs": [_fmt(c) for c in w.coeffs],
        }
        lines = [
            "definable: P = "
            + " + ".join([_fmt(w.offset)] + [
                f"{_fmt(c)}*F{j}" for j, c in enumerate(w.coeffs) if c != 0
            ])
        ]
        _emit(args, payload, lines)
        return OK
    payload = {"definable": False}
    lines = ["not definable over the family"]
    if rep.conflict is not None:
        a, b = rep.conflict.key_a, rep.conflict.key_b
        lines.append(f"  tuples {_labels(M, a)} and {_labels(M, b)} share family values but differ")
        payload["conflict"] = [[M.elements[i] for i in a], [M.elements[i] for i in b]]
    if rep.residue is not None:
        payload["residue"] = True
        lines.append("  linear system inconsistent over the realized vectors")
    _emit(args, payload, lines)
    return CHECK_FALSE


def cmd_def_set(args) -> int:
    M = load_structure(args.structure)
    D = _tuple_set(M, args.set)
    family = load_family(args.family, M.signature(), _vars(args))
    rep = is_definable_set(M, D, family)
    return _emit_definability(args, M, rep)


def cmd_def_project(args) -> int:
    M = load_structure(args.structure)
    P = load_predicate(args.predicate)
    D = _tuple_set(M, args.set)
    rep = inf_over_definable(M, D, P, parse_rational(args.lam))
    payload = {
        "identity_holds": rep.identity_holds,
        "values": {",".join(map(str, a)): _fmt(v) for a, v in sorted(rep.table.values.items())},
    }
    lines = ["identity holds" if rep.identity_holds else "identity FAILS"]
    for a, v in sorted(rep.table.values.items()):
        lines.append(f"  Q{_labels(M, a)} = {_fmt(v)}")
    _emit(args, payload, lines)
    return OK if rep.identity_holds else CHECK_FALSE


def cmd_def_invariant_type(args) -> int:
    M = load_structure(args.structure)
    f = load_function_table(args.function)
    family = load_family(args.family, M.signature(), _vars(args))
    p = invariant_type(M, f, family)
    assert p.witness is not None
    payload = {
        "values": [_fmt(x) for x in p.values],
        "witness": _witness_obj(M, p.witness),
    }
    mix = ", ".join(f"{_labels(M, a)}:{_fmt(w)}" for a, w in sorted(p.witness.items()))
    lines = [
        "type values: (" + ", ".join(_fmt(x) for x in p.values) + ")",
        f"witness distribution {{{mix}}}",
    ]
    _emit(args, payload, lines)
    return OK


def cmd_def_auto_invariant(args) -> int:
    M = load_structure(args.structure)
    P = load_predicate(args.predicate)
    rep = automorphism_invariant(M, P)
    if rep.invariant:
        _emit(args, {"invariant": True}, ["invariant under all automorphisms"])
        return OK
    perm, a = rep.witness
    payload = {
        "invariant": False,
        "permutation": list(perm),
        "tuple": [M.elements[i] for i in a],
    }
    moves = " ".join(f"{M.elements[i]}->{M.elements[j]}" for i, j in enumerate(perm))
    _emit(args, payload, [f"NOT invariant: {moves} moves {_labels(M, a)}"])
    return CHECK_FALSE


# ---------------------------------------------------------------------------
# probability-algebra commands


def _algebra_for(args) -> MeasureAlgebra:
    return build_algebra(_fractions(args.atoms))


def cmd_pra_build(args) -> int:
    A = _algebra_for(args)
    M = A.to_structure()
    payload = {"atoms": [_fmt(w) for w in A.weights], "elements": A.size}
    if A.k <= 6:
        validation = validate_structure(M)
        payload["valid"] = validation.ok
        state = "valid" if validation.ok else "INVALID"
    else:
        validation = None
        payload["valid"] = None
        state = "validation skipped at this size"
    lines = [f"{A.size} elements over {A.k} atoms; export {state}"]
    if args.out:
        save_structure(M, args.out)
        payload["out"] = args.out
        lines.append(f"wrote {args.out}")
    _emit(args, payload, lines)
    return OK if validation is None or validation.ok else CHECK_FALSE


def cmd_pra_interval(args) -> int:
    A = _algebra_for(args)
    x = _algebra_element(A, args.x)
    a = _algebra_element(A, args.a)
    b = _algebra_element(A, args.b)
    value = interval_distance(A, x, a, b)
    proj = interval_projection(A, x, a, b)
    payload = {"distance": _fmt(value), "projection": A.label(proj)}
    _emit(args, payload,
          [f"d({A.label(x)}, [{A.label(a)},{A.label(b)}]) = {_fmt(value)}",
           f"nearest point {A.label(proj)}"])
    return OK


def cmd_pra_hahn(args) -> int:
    A = _algebra_for(args)
    values = _fractions(args.values)
    f = AdditiveFunction(tuple(values))
    rep = hahn_max_set(A, f)
    payload = {
        "a": A.label(rep.a),
        "b": A.label(rep.b),
        "lower": A.label(rep.lower),
        "upper": A.label(rep.upper),
        "max": _fmt(rep.max_value),
    }
    lines = [
        f"nonnegative part a = {A.label(rep.a)}, nonpositive part b = {A.label(rep.b)}",
        f"max {_fmt(rep.max_value)} attained exactly on [{A.label(rep.lower)}, {A.label(rep.upper)}]",
    ]
    _emit(args, payload, lines)
    return OK


def cmd_pra_dcl(args) -> int:
    A = _algebra_for(args)
    S = [_algebra_element(A, part) for part in args.elements.split(";") if part.strip()]
    closure = sorted(dcl(A, S))
    payload = {"closure": [A.label(x) for x in closure]}
    _emit(args, payload,
          [f"{len(closure)} elements: " + " ".join(A.label(x) for x in closure)])
    return OK


def cmd_pra_definable(args) -> int:
    A = _algebra_for(args)
    D = [_algebra_element(A, part) for part in args.elements.split(";") if part.strip()]
    rep = pra_definable_check(A, D)
    if rep.definable:
        payload = {"definable": True, "lower": A.label(rep.lower), "upper": A.label(rep.upper)}
        _emit(args, payload,
              [f"definable: D = [{A.label(rep.lower)}, {A.label(rep.upper)}]"])
        return OK
    payload = {"definable": False, "witness": A.label(rep.witness)}
    _emit(args, payload,
          [f"not definable: {A.label(rep.witness)} lies in "
           f"[{A.label(rep.lower)}, {A.label(rep.upper)}] but not in D"])
    return CHECK_FALSE


# ---------------------------------------------------------------------------
# suites


def cmd_suite(args) -> int:
    names = args.names or None
    results = run_suites(names, seed=args.seed)
    payload = []
    for res in results:
        if not args.json:
            print(res.line())
        payload.append({
            "name": res.name,
            "ok": res.ok,
            "checked": res.checked,
            "seconds": res.seconds,
            "detail": res.detail,
        })
    if args.json:
        print(json.dumps(payload, indent=2))
    return OK if all(r.ok for r in results) else CHECK_FALSE


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinelogic",
        description="Affine continuous logic over finite metric structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, structure=False, family=False, cap=False):
        p.add_argument("--json", action="store_true", help="machine-readable report")
        if structure:
            p.add_argument("--structure", required=True, help="structure JSON file")
        if family:
            p.add_argument("--family", required=True, help="formula list file")
            p.add_argument("--vars", help="comma-separated family variables")
        if cap:
            p.add_argument("--cap", type=int, default=4096, help="size cap")

    p = sub.add_parser("parse", help="parse and re-render a formula")
    p.add_argument("formula")
    p.add_argument("--structure", help="take the signature from this structure")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("cert", help="Lipschitz certificate of a formula")
    p.add_argument("formula")
    p.add_argument("--structure", help="take the signature from this structure")
    common(p)
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("eval", help="evaluate a formula in a structure")
    p.add_argument("formula")
    common(p, structure=True)
    p.add_argument("--assign", action="append", help="NAME=ELEMENT", default=[])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("automorphisms", help="list the automorphism group")
    common(p, structure=True)
    p.set_defaults(func=cmd_automorphisms)

    um = sub.add_parser("ultramean", help="measure-weighted products").add_subparsers(
        dest="subcommand", required=True
    )
    p = um.add_parser("build", help="build the quotient structure")
    p.add_argument("--structure", action="append", required=True)
    p.add_argument("--mu", required=True, help="comma-separated weights")
    p.add_argument("--out", help="write the quotient structure here")
    p.add_argument("--json", action="store_true")
    p.add_argument("--cap", type=int, default=4096)
    p.set_defaults(func=cmd_ultramean_build)
    p = um.add_parser("verify", help="check the mean identity for a formula")
    p.add_argument("formula")
    p.add_argument("--structure", action="append", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--assign", action="append", default=[], help="NAME=i,j,... per factor")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ultramean_verify)

    ty = sub.add_parser("types", help="type hulls and faces").add_subparsers(
        dest="subcommand", required=True
    )
    p = ty.add_parser("hull", help="realized type vectors")
    common(p, structure=True, family=True, cap=True)
    p.set_defaults(func=cmd_types_hull)
    p = ty.add_parser("extreme", help="extreme points with certificates")
    common(p, structure=True, family=True, cap=True)
    p.set_defaults(func=cmd_types_extreme)
    p = ty.add_parser("face", help="exposed face of an affine functional")
    common(p, structure=True, family=True, cap=True)
    p.add_argument("--predicate", required=True, help="predicate table JSON")
    p.add_argument("--max", action="store_true", help="maximize instead of minimize")
    p.set_defaults(func=cmd_types_face)
    p = ty.add_parser("facial", help="does a condition set cut a face?")
    common(p, structure=True, family=True, cap=True)
    p.add_argument("--condition", action="append", required=True)
    p.set_defaults(func=cmd_types_facial)
    p = ty.add_parser("satisfiable", help="affine satisfiability dichotomy")
    common(p, structure=True, cap=True)
    p.add_argument("--condition", action="append", required=True)
    p.add_argument("--vars", help="comma-separated variables")
    p.set_defaults(func=cmd_types_satisfiable)
    p = ty.add_parser("barycenter", help="mix extreme vertices by a measure")
    common(p, structure=True, family=True, cap=True)
    p.add_argument("--weights", required=True, help="INDEX=p/q, comma-separated")
    p.set_defaults(func=cmd_types_barycenter)
    p = ty.add_parser("keisler", help="decompose a type over the extreme boundary")
    common(p, structure=True, family=True, cap=True)
    p.add_argument("--point", help="realize the type at this tuple")
    p.add_argument("--values", help="type vector, comma-separated rationals")
    p.set_defaults(func=cmd_types_keisler)
    p = ty.add_parser("distance", help="transport distance between realized types")
    common(p, structure=True, family=True, cap=True)
    p.add_argument("--left", required=True, help="tuple, comma-separated")
    p.add_argument("--right", required=True, help="tuple, comma-separated")
    p.set_defaults(func=cmd_types_distance)

    dc = sub.add_parser("defcheck", help="definability checks").add_subparsers(
        dest="subcommand", required=True
    )
    p = dc.add_parser("distance-axioms", help="distance-predicate axioms")
    common(p, structure=True)
    p.add_argument("--predicate", required=True)
    p.set_defaults(func=cmd_def_distance_axioms)
    p = dc.add_parser("recover", help="zero set of a distance predicate")
    common(p, structure=True)
    p.add_argument("--predicate", required=True)
    p.set_defaults(func=cmd_def_recover)
    p = dc.add_parser("domination", help="least lam with Q <= lam*P + eps")
    common(p, structure=True)
    p.add_argument("--lower", required=True, help="P table JSON")
    p.add_argument("--upper", required=True, help="Q table JSON")
    p.add_argument("--eps", default="0", help="slack rational")
    p.set_defaults(func=cmd_def_domination)
    p = dc.add_parser("predicate", help="affine factoring through a family")
    common(p, structure=True, family=True)
    p.add_argument("--predicate", required=True)
    p.set_defaults(func=cmd_def_predicate)
    p = dc.add_parser("set", help="definability of a tuple set")
    common(p, structure=True, family=True)
    p.add_argument("--set", required=True, help="tuples 'a,b;c,d'")
    p.set_defaults(func=cmd_def_set)
    p = dc.add_parser("project", help="inf of P over D with the penalty identity")
    common(p, structure=True)
    p.add_argument("--predicate", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--lam", required=True)
    p.set_defaults(func=cmd_def_project)
    p = dc.add_parser("invariant-type", help="pushforward-fixed type of a unary map")
    common(p, structure=True, family=True)
    p.add_argument("--function", required=True, help="function table JSON")
    p.set_defaults(func=cmd_def_invariant_type)
    p = dc.add_parser("auto-invariant", help="automorphism invariance of a table")
    common(p, structure=True)
    p.add_argument("--predicate", required=True)
    p.set_defaults(func=cmd_def_auto_invariant)

    pa = sub.add_parser("pra", help="probability algebras").add_subparsers(
        dest="subcommand", required=True
    )
    p = pa.add_parser("build", help="build and validate an algebra")
    p.add_argument("--atoms", required=True, help="positive weights summing to 1")
    p.add_argument("--out", help="write the exported structure here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pra_build)
    p = pa.add_parser("interval", help="distance to an order interval")
    p.add_argument("--atoms", required=True)
    p.add_argument("-x", required=True, help="element (bitmask label or index)")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pra_interval)
    p = pa.add_parser("hahn", help="max-set of an additive function")
    p.add_argument("--atoms", required=True)
    p.add_argument("--values", required=True, help="one rational per atom")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pra_hahn)
    p = pa.add_parser("dcl", help="generated subalgebra")
    p.add_argument("--atoms", required=True)
    p.add_argument("--elements", required=True, help="labels 'lab;lab'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pra_dcl)
    p = pa.add_parser("definable", help="interval criterion for a subset")
    p.add_argument("--atoms", required=True)
    p.add_argument("--elements", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pra_definable)

    p = sub.add_parser("suite", help="run the randomized check suites")
    p.add_argument("names", nargs="*", help=f"subset of: {', '.join(SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_suite)

    return parser


_USER_ERRORS = (
    CliError,
    FormatError,
    FormulaError,
    StructureError,
    EvalError,
    MeanError,
    TypespaceError,
    DefinabilityError,
    AlgebraError,
    OSError,
    KeyError,
    ValueError,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DecompositionError as exc:
        if "separate" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return USAGE_ERROR
        print(f"no decomposition: {exc}", file=sys.stderr)
        return CHECK_FALSE
    except NotAffineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
