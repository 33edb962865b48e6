"""Translate Prolog/CLP(Z) programs into SMT-LIB constrained Horn clauses."""

__version__ = "0.1.0"

from .checks import HornShapeError, SortError, check_horn_shape, check_sorts
from .oracle import (
    Bounds, GroundFactSet, QueryAnswer, UniverseTooLarge, enumerate_universe,
    fixpoint, program_holds, query_holds,
)
from .signatures import (
    FeatureSet, FunctionSig, NameTable, Namespace, PredicateSig, build_name_table,
    collect_functions, collect_predicates, detect_features, mangle,
)
from .smtlib import Script, emit, parse_script, structurally_equal
from .syntax import (
    Clause, ClauseKind, Database, Diagnostic, PrologSyntaxError, UnsupportedConstruct,
    parse_program, parse_term, print_program,
)
from .translator import (
    NegatedPredicate, TranslationError, translate_clause, translate_program, translate_term,
)

__all__ = [
    "Bounds", "Clause", "ClauseKind", "Database", "Diagnostic", "FeatureSet",
    "FunctionSig", "GroundFactSet", "HornShapeError", "NameTable", "Namespace",
    "NegatedPredicate", "PredicateSig", "PrologSyntaxError", "QueryAnswer", "Script",
    "SortError", "TranslationError", "UniverseTooLarge", "UnsupportedConstruct",
    "build_name_table", "check_horn_shape", "check_sorts", "collect_functions",
    "collect_predicates", "detect_features", "emit", "enumerate_universe", "fixpoint",
    "mangle", "parse_program", "parse_script", "parse_term", "print_program",
    "program_holds", "query_holds", "structurally_equal", "translate_clause",
    "translate_program", "translate_term",
]
