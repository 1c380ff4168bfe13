"""Workbench for affine continuous logic over finite metric structures.

Formulas are built from relation and metric atoms with rational scaling,
addition, and inf/sup binders; structures are finite [0,1]-valued metric
spaces with Lipschitz-bounded interpretations.  Everything downstream is
exact rational arithmetic: measure-weighted products of structures, type
hulls with extreme points and faces, affine satisfiability with Farkas
certificates, distance predicates and definability checks, and finite
probability algebras.
"""

from .linalg import affine_factor, affinely_independent, gauss_solve
from .linprog import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_standard
from .mean import (
    MeanStructure,
    Ultracharge,
    build_ultramean,
    check_ultramean_identity,
    diagonal_class,
    powermean,
)
from .model import (
    FiniteStructure,
    FunctionInterp,
    RelationInterp,
    automorphisms,
    eval_condition,
    eval_formula,
    eval_table,
    validate_structure,
)
from .definability import (
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
from .pra import (
    AdditiveFunction,
    MeasureAlgebra,
    build_algebra,
    check_algebra_axioms,
    dcl,
    hahn_max_set,
    interval_distance,
    interval_projection,
    pra_definable_check,
)
from .rationals import format_rational, parse_rational
from .suites import SUITES, SuiteResult, run_suites
from .syntax import (
    Apply,
    Condition,
    Const,
    Formula,
    Func,
    Inf,
    LipschitzCertificate,
    One,
    Scale,
    Signature,
    Sum,
    Sup,
    SymbolInfo,
    Term,
    Var,
    affine_combine,
    certificate,
    check_formula,
    free_vars,
    parse_condition,
    parse_formula,
    render,
    render_condition,
)
from .typespace import (
    BoundaryMeasure,
    FormulaFamily,
    TypeHull,
    TypeVector,
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

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
