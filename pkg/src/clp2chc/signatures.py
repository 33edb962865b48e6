"""Signature collection and SMT-LIB name mangling."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .syntax import (
    ArithConstraint, ArithExpr, Atom, Call, Clause, Compound, Database, IntLit,
    ListTerm, Negation, Span, Var, clause_terms, item_terms, subterms,
)


@dataclass(frozen=True)
class FunctionSig:
    name: str
    arity: int
    first_occurrence: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class PredicateSig:
    name: str
    arity: int


@dataclass(frozen=True)
class FeatureSet:
    uses_lists: bool = False
    uses_integers: bool = False


def _terms_of(obj) -> Iterable:
    if isinstance(obj, Database):
        for c in obj.clauses:
            yield from clause_terms(c)
    elif isinstance(obj, Clause):
        yield from clause_terms(obj)
    elif isinstance(obj, (tuple, list)):
        for x in obj:
            yield from _terms_of(x)
    elif isinstance(obj, (Var, Atom, Compound, ListTerm, IntLit, ArithExpr)):
        yield obj
    else:
        yield from item_terms(obj)


def collect_functions(obj) -> list:
    """Atoms and function symbols occurring in terms, as :class:`FunctionSig`.

    ``obj`` may be a Database, a Clause, a body item or a single term.  The
    result is ordered by first (pre-order, left-to-right) occurrence and has
    one entry per name/arity pair.  Predicate symbols are not included;
    list constructors, integers and arithmetic operators contribute nothing.
    """
    found = {}
    for t in _terms_of(obj):
        for s in subterms(t):
            if isinstance(s, Atom):
                found.setdefault((s.name, 0), s.span)
            elif isinstance(s, Compound):
                found.setdefault((s.name, len(s.args)), s.span)
    return [FunctionSig(n, a, sp) for (n, a), sp in found.items()]


def _calls(c: Clause):
    if c.head is not None:
        yield c.head
    for item in c.body:
        while isinstance(item, Negation):
            item = item.inner
        if isinstance(item, Call):
            yield item


def collect_predicates(db: Database) -> list:
    found = {}
    for c in db.clauses:
        for call in _calls(c):
            found.setdefault((call.predicate, call.arity), None)
    return [PredicateSig(n, a) for n, a in found]


def detect_features(db: Database) -> FeatureSet:
    lists = ints = False
    for c in db.clauses:
        for item in c.body:
            while isinstance(item, Negation):
                item = item.inner
            if isinstance(item, ArithConstraint):
                ints = True
        for t in clause_terms(c):
            for s in subterms(t):
                if isinstance(s, ListTerm):
                    lists = True
                elif isinstance(s, (IntLit, ArithExpr)):
                    ints = True
    return FeatureSet(lists, ints)


# -- names -------------------------------------------------------------------

class Namespace(enum.Enum):
    CONSTRUCTOR = "constructor"
    SELECTOR = "selector"
    PREDICATE = "predicate"
    VARIABLE = "variable"


RESERVED = frozenset({
    # SMT-LIB reserved words and commands
    "_", "!", "as", "let", "exists", "forall", "match", "par", "NUMERAL",
    "DECIMAL", "STRING", "BINARY", "HEXADECIMAL", "assert", "check-sat",
    "declare-fun", "declare-datatype", "declare-datatypes", "set-logic",
    # core and integer theory symbols
    "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite",
    "Bool", "Int", "+", "-", "*", "div", "mod", "abs", "<", "<=", ">", ">=",
    "is",
    # symbols of the universal encoding
    "U", "L", "nil", "cons", "head", "tail", "aList", "theList", "anInt",
    "theInt", "u$default",
})

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*\Z")


def is_simple_symbol(name: str) -> bool:
    return bool(_SIMPLE_SYMBOL.match(name)) and name[0] not in "@." and name not in ("_", "!")


def quote_symbol(name: str) -> str:
    if is_simple_symbol(name):
        return name
    # '|' and '\' cannot appear inside a quoted symbol
    safe = name.replace("\\", "$5C").replace("|", "$7C")
    return safe if is_simple_symbol(safe) else f"|{safe}|"


Key = tuple  # (Namespace, prolog name, arity)


class NameTable:
    """Bidirectional map between Prolog names and emitted SMT-LIB symbols.

    Construct with the full signature of a program (see
    :func:`build_name_table`) so that clashes are known before any name is
    handed out.
    """

    def __init__(self, functions: Iterable[FunctionSig] = (), predicates: Iterable[PredicateSig] = ()):
        functions, predicates = list(functions), list(predicates)
        self._forward: dict = {}
        self._backward: dict = {}
        self._arities = {Namespace.CONSTRUCTOR: {}, Namespace.PREDICATE: {}}
        for f in functions:
            self._arities[Namespace.CONSTRUCTOR].setdefault(f.name, set()).add(f.arity)
        for p in predicates:
            self._arities[Namespace.PREDICATE].setdefault(p.name, set()).add(p.arity)
        self._predicate_names = set(self._arities[Namespace.PREDICATE])

    def __contains__(self, key: Key) -> bool:
        return key in self._forward

    def __len__(self):
        return len(self._forward)

    def get(self, ns: Namespace, name: str, arity: int = 0) -> str:
        return self._forward[(ns, name, arity)]

    def constructor(self, name: str, arity: int) -> str:
        return mangle(name, arity, Namespace.CONSTRUCTOR, self)

    def selector(self, constructor: str, arity: int, index: int) -> str:
        return mangle(f"{constructor}\x00{index}", arity, Namespace.SELECTOR, self)

    def predicate(self, name: str, arity: int) -> str:
        return mangle(name, arity, Namespace.PREDICATE, self)

    def variable(self, name: str) -> str:
        return mangle(name, 0, Namespace.VARIABLE, self)

    def reverse(self, symbol: str) -> Key:
        return self._backward[symbol]

    def symbols(self) -> list:
        return list(self._backward)

    def _register(self, key: Key, symbol: str):
        self._forward[key] = symbol
        self._backward[symbol] = key


def mangle(name: str, arity: int, ns: Namespace, table: NameTable) -> str:
    """Return the SMT-LIB symbol for a Prolog name, registering it in ``table``.

    Names are kept verbatim when possible.  Otherwise ``$<arity>`` separates
    uses of one name at several arities, ``$c`` marks a constructor whose
    name is also a predicate, reserved words get ``$<arity>`` (constructors),
    ``$p`` (predicates) or ``$v`` (variables), any remaining clash gets a
    numeric ``$n``, and illegal characters force ``|...|`` quoting.
    Selectors are ``<constructor>_<i>``.
    """
    key = (ns, name, arity)
    if key in table._forward:
        return table._forward[key]

    if ns is Namespace.SELECTOR:
        ctor, index = name.split("\x00")
        base = _bare(table.constructor(ctor, arity)) + f"_{index}"
    else:
        base = name
        if ns in table._arities and len(table._arities[ns].get(name, ())) > 1:
            base = f"{base}${arity}"
        if ns is Namespace.CONSTRUCTOR and name in table._predicate_names:
            base = f"{base}$c"
        if base in RESERVED:
            suffix = {Namespace.CONSTRUCTOR: f"${arity}", Namespace.PREDICATE: "$p"}.get(ns, "$v")
            base = base + suffix

    candidate, n = base, 1
    while quote_symbol(candidate) in table._backward or candidate in RESERVED:
        n += 1
        candidate = f"{base}${n}"
    symbol = quote_symbol(candidate)
    table._register(key, symbol)
    return symbol


def _bare(symbol: str) -> str:
    return symbol[1:-1] if symbol.startswith("|") else symbol


def build_name_table(db: Database, functions=None, predicates=None) -> NameTable:
    """Assign every name of ``db`` its symbol, in a fixed order.

    Constructors and their selectors come first, then predicates, then
    variables in order of first occurrence.
    """
    functions = collect_functions(db) if functions is None else functions
    predicates = collect_predicates(db) if predicates is None else predicates
    table = NameTable(functions, predicates)
    for f in functions:
        table.constructor(f.name, f.arity)
        for i in range(1, f.arity + 1):
            table.selector(f.name, f.arity, i)
    for p in predicates:
        table.predicate(p.name, p.arity)
    for c in db.clauses:
        for t in clause_terms(c):
            for s in subterms(t):
                if isinstance(s, Var):
                    table.variable(s.name)
    return table
