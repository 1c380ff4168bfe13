"""JSON file formats with bit-exact 'p/q' rationals.

Structure files carry elements, a row-major metric, constants, and
function/relation tables keyed by comma-joined element indices.  Family
files are plain text, one formula per line.  Algebra files list atom
weights.  Nothing here ever goes through floating point.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Sequence

from .definability import FunctionTable, PredicateTable
from .model import FiniteStructure, FunctionInterp, RelationInterp
from .pra import MeasureAlgebra, build_algebra
from .rationals import format_rational, parse_rational
from .syntax import Formula, Signature, SymbolInfo, parse_formula
from .typespace import FormulaFamily


class FormatError(ValueError):
    pass


def _key_of(args: Sequence[int]) -> str:
    return ",".join(str(a) for a in args)


def _parse_key(text: str, arity: int) -> tuple[int, ...]:
    parts = tuple(int(p) for p in text.split(",")) if text else ()
    if len(parts) != arity:
        raise FormatError(f"table key {text!r} does not have arity {arity}")
    return parts


# ---------------------------------------------------------------------------
# signatures


def signature_to_dict(sig: Signature) -> dict:
    return {
        "constants": sorted(sig.constants),
        "functions": {
            k: {"arity": v.arity, "lambda": format_rational(v.lam)}
            for k, v in sorted(sig.functions.items())
        },
        "relations": {
            k: {"arity": v.arity, "lambda": format_rational(v.lam)}
            for k, v in sorted(sig.relations.items())
        },
    }


def signature_from_dict(data: Mapping) -> Signature:
    return Signature(
        frozenset(data.get("constants", [])),
        {
            k: SymbolInfo(int(v["arity"]), parse_rational(v["lambda"]))
            for k, v in data.get("functions", {}).items()
        },
        {
            k: SymbolInfo(int(v["arity"]), parse_rational(v["lambda"]))
            for k, v in data.get("relations", {}).items()
        },
    )


# ---------------------------------------------------------------------------
# structures


def structure_to_dict(M: FiniteStructure) -> dict:
    return {
        "elements": list(M.elements),
        "metric": [[format_rational(d) for d in row] for row in M.metric],
        "constants": {k: M.elements[v] for k, v in sorted(M.constants.items())},
        "functions": {
            name: {
                "arity": fn.arity,
                "lambda": format_rational(fn.lam),
                "table": {_key_of(a): out for a, out in sorted(fn.table.items())},
            }
            for name, fn in sorted(M.functions.items())
        },
        "relations": {
            name: {
                "arity": rel.arity,
                "lambda": format_rational(rel.lam),
                "table": {
                    _key_of(a): format_rational(v) for a, v in sorted(rel.table.items())
                },
            }
            for name, rel in sorted(M.relations.items())
        },
    }


def structure_from_dict(data: Mapping) -> FiniteStructure:
    try:
        elements = tuple(str(e) for e in data["elements"])
        metric = tuple(
            tuple(parse_rational(d) for d in row) for row in data["metric"]
        )
    except KeyError as exc:
        raise FormatError(f"structure file missing field {exc}") from None
    index = {label: i for i, label in enumerate(elements)}

    def elem(ref) -> int:
        if isinstance(ref, int):
            return ref
        if ref in index:
            return index[ref]
        raise FormatError(f"unknown element reference {ref!r}")

    constants = {k: elem(v) for k, v in data.get("constants", {}).items()}
    functions = {}
    for name, spec in data.get("functions", {}).items():
        arity = int(spec["arity"])
        table = {
            _parse_key(k, arity): elem(v) for k, v in spec["table"].items()
        }
        functions[name] = FunctionInterp(arity, parse_rational(spec["lambda"]), table)
    relations = {}
    for name, spec in data.get("relations", {}).items():
        arity = int(spec["arity"])
        table = {
            _parse_key(k, arity): parse_rational(v) for k, v in spec["table"].items()
        }
        relations[name] = RelationInterp(arity, parse_rational(spec["lambda"]), table)
    return FiniteStructure(elements, metric, constants, functions, relations)


def save_structure(M: FiniteStructure, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(structure_to_dict(M), fh, indent=2)
        fh.write("\n")


def load_structure(path: str) -> FiniteStructure:
    with open(path) as fh:
        return structure_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# families (one formula per line)


def load_family(
    path: str, sig: Signature, variables: Sequence[str] | None = None
) -> FormulaFamily:
    with open(path) as fh:
        formulas = parse_family_lines(fh.read().splitlines(), sig)
    return family_with_variables(formulas, variables)


def parse_family_lines(lines: Sequence[str], sig: Signature) -> list[Formula]:
    formulas = []
    for line in lines:
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        formulas.append(parse_formula(text, sig))
    return formulas


def family_with_variables(
    formulas: Sequence[Formula], variables: Sequence[str] | None
) -> FormulaFamily:
    from .syntax import free_vars

    if variables is None:
        names: set[str] = set()
        for phi in formulas:
            names |= free_vars(phi)
        variables = tuple(sorted(names))
    return FormulaFamily(tuple(variables), tuple(formulas))


# ---------------------------------------------------------------------------
# predicate and function tables


def predicate_to_dict(P: PredicateTable) -> dict:
    return {
        "arity": P.arity,
        "values": {_key_of(a): format_rational(v) for a, v in sorted(P.values.items())},
    }


def predicate_from_dict(data: Mapping) -> PredicateTable:
    arity = int(data["arity"])
    values = {
        _parse_key(k, arity): parse_rational(v) for k, v in data["values"].items()
    }
    return PredicateTable(arity, values)


def function_table_to_dict(f: FunctionTable) -> dict:
    return {
        "arity_in": f.arity_in,
        "arity_out": f.arity_out,
        "lambda": format_rational(f.lam),
        "table": {_key_of(a): list(out) for a, out in sorted(f.table.items())},
    }


def function_table_from_dict(data: Mapping) -> FunctionTable:
    arity_in = int(data["arity_in"])
    arity_out = int(data["arity_out"])
    table = {}
    for k, v in data["table"].items():
        out = tuple(int(x) for x in (v if isinstance(v, list) else [v]))
        if len(out) != arity_out:
            raise FormatError(f"function table output {v!r} does not match arity_out")
        table[_parse_key(k, arity_in)] = out
    return FunctionTable(arity_in, arity_out, parse_rational(data["lambda"]), table)


def load_predicate(path: str) -> PredicateTable:
    with open(path) as fh:
        return predicate_from_dict(json.load(fh))


def save_predicate(P: PredicateTable, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(predicate_to_dict(P), fh, indent=2)
        fh.write("\n")


def load_function_table(path: str) -> FunctionTable:
    with open(path) as fh:
        return function_table_from_dict(json.load(fh))


def save_function_table(f: FunctionTable, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(function_table_to_dict(f), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# algebras


def algebra_to_dict(A: MeasureAlgebra) -> dict:
    return {"atoms": [format_rational(w) for w in A.weights]}


def algebra_from_dict(data: Mapping) -> MeasureAlgebra:
    return build_algebra([parse_rational(w) for w in data["atoms"]])


def load_algebra(path: str) -> MeasureAlgebra:
    with open(path) as fh:
        return algebra_from_dict(json.load(fh))


def save_algebra(A: MeasureAlgebra, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(algebra_to_dict(A), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# witness distributions


def witness_to_dict(witness: Mapping[tuple[int, ...], Fraction]) -> dict:
    arity = len(next(iter(witness))) if witness else 0
    return {
        "arity": arity,
        "weights": {_key_of(a): format_rational(w) for a, w in sorted(witness.items())},
    }


def witness_from_dict(data: Mapping) -> dict[tuple[int, ...], Fraction]:
    arity = int(data["arity"])
    return {
        _parse_key(k, arity): parse_rational(v) for k, v in data["weights"].items()
    }


def load_witness(path: str) -> dict[tuple[int, ...], Fraction]:
    with open(path) as fh:
        return witness_from_dict(json.load(fh))
