"""Bounded bottom-up evaluation of Prolog/CLP(Z) programs.

The oracle computes the least set of ground facts closed under the
program's clauses, with every variable ranging over a finite slice of the
Herbrand universe (bounded term depth, integer range and list length).
Its semantics mirror the SMT translation: arithmetic on a non-integer or a
list tail that is not a list makes the clause instance fail, ``=`` is
syntactic equality of finite terms, and ``/`` and ``mod`` follow SMT-LIB
``div`` and ``mod``.

Besides ``saturated`` (fixpoint reached within the iteration budget) the
results carry ``exhaustive``: false as soon as some instance was cut off
by the bounds or hit an undefined operation such as division by zero.  A
negative answer only speaks for the unbounded program when both hold.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .signatures import FeatureSet, collect_functions, detect_features
from .syntax import (
    ArithConstraint, ArithExpr, Atom, Call, Clause, ClauseKind, Compound,
    Database, IntLit, ListTerm, Negation, TermDiseq, Unify, Var,
    clause_variables, subterms,
)
from .translator import NegatedPredicate

DEFAULT_CAP = 10 ** 6


@dataclass(frozen=True)
class Bounds:
    term_depth: int = 3
    int_range: tuple = (0, 20)
    max_list_len: int = 4
    max_iterations: int = 1000

    def __post_init__(self):
        lo, hi = self.int_range
        if self.term_depth < 1 or self.max_iterations < 1 or self.max_list_len < 0:
            raise ValueError("bounds must be positive")
        if lo > hi:
            raise ValueError("int_range must be non-empty")


class UniverseTooLarge(RuntimeError):
    pass


# -- ground terms ------------------------------------------------------------

def term_depth(t) -> int:
    """Nesting depth; constants are depth 1 and each list level adds one."""
    if isinstance(t, Compound):
        return 1 + max(term_depth(a) for a in t.args)
    if isinstance(t, ListTerm) and t.elements:
        return 1 + max(term_depth(e) for e in t.elements)
    return 1


def _universe_counts(funcs, feats: FeatureSet, b: Bounds, depth: int) -> int:
    base = sum(1 for f in funcs if f.arity == 0)
    if feats.uses_integers:
        base += b.int_range[1] - b.int_range[0] + 1
    if feats.uses_lists:
        base += 1
    n = base
    for _ in range(2, depth + 1):
        prev = n
        n = base + sum(prev ** f.arity for f in funcs if f.arity > 0)
        if feats.uses_lists:
            n += sum(prev ** k for k in range(1, b.max_list_len + 1))
    return n


def enumerate_universe(funcs, feats: FeatureSet, b: Bounds, cap: int = DEFAULT_CAP,
                       depth: Optional[int] = None) -> list:
    """All ground terms of depth at most ``depth`` (default ``b.term_depth``).

    Constants come first (atoms, then integers in ``b.int_range``, then
    ``[]``), followed by compound terms and then lists.
    """
    depth = b.term_depth if depth is None else depth
    if depth < 1:
        return []
    funcs = list(funcs)
    size = _universe_counts(funcs, feats, b, depth)
    if size > cap:
        raise UniverseTooLarge(f"universe of depth {depth} has {size} terms (cap {cap})")
    base = [Atom(f.name) for f in funcs if f.arity == 0]
    if feats.uses_integers:
        base += [IntLit(i) for i in range(b.int_range[0], b.int_range[1] + 1)]
    if feats.uses_lists:
        base.append(ListTerm(()))
    level = base
    for _ in range(2, depth + 1):
        prev, level = level, list(base)
        for f in funcs:
            if f.arity > 0:
                level += [Compound(f.name, args) for args in itertools.product(prev, repeat=f.arity)]
        if feats.uses_lists:
            for k in range(1, b.max_list_len + 1):
                level += [ListTerm(els) for els in itertools.product(prev, repeat=k)]
    return level


class _Undefined(Exception):
    """Arithmetic with no defined value (division by zero)."""


class _Unbound(Exception):
    pass


def _div(x: int, y: int) -> tuple:
    # SMT-LIB div/mod: x = y*q + r with 0 <= r < |y|
    if y == 0:
        raise _Undefined
    r = x % abs(y)
    return (x - r) // y, r


def evaluate(t, s: dict):
    """Ground value of ``t`` under substitution ``s``; None when ill-typed.

    Raises ``_Unbound`` when a variable of ``t`` is not bound.
    """
    if isinstance(t, Var):
        try:
            return s[t.name]
        except KeyError:
            raise _Unbound(t.name) from None
    if isinstance(t, (Atom, IntLit)):
        return t
    if isinstance(t, Compound):
        args = tuple(evaluate(a, s) for a in t.args)
        return None if any(a is None for a in args) else Compound(t.name, args)
    if isinstance(t, ListTerm):
        els = tuple(evaluate(e, s) for e in t.elements)
        if any(e is None for e in els):
            return None
        if t.tail is None:
            return ListTerm(els)
        tail = evaluate(t.tail, s)
        if not isinstance(tail, ListTerm):
            return None
        return ListTerm(els + tail.elements)
    if isinstance(t, ArithExpr):
        vals = [evaluate(o, s) for o in t.operands]
        if not all(isinstance(v, IntLit) for v in vals):
            return None
        if t.unary:
            return IntLit(-vals[0].value)
        x, y = vals[0].value, vals[1].value
        if t.op == "+":
            return IntLit(x + y)
        if t.op == "-":
            return IntLit(x - y)
        if t.op == "*":
            return IntLit(x * y)
        q, r = _div(x, y)
        return IntLit(q if t.op == "/" else r)
    raise TypeError(f"not a term: {t!r}")


def _vars(t) -> list:
    return [s.name for s in subterms(t) if isinstance(s, Var)]


def _item_vars(item) -> list:
    if isinstance(item, Negation):
        return _item_vars(item.inner)
    if isinstance(item, Call):
        return [v for a in item.args for v in _vars(a)]
    return _vars(item.lhs) + _vars(item.rhs)


def _match(p, g, s: dict, pending: list) -> Optional[dict]:
    """Extend ``s`` so that pattern ``p`` equals ground ``g``.

    Arithmetic sub-patterns with unbound variables are deferred by adding
    an equation to ``pending``.
    """
    if isinstance(p, Var):
        if p.name in s:
            return s if s[p.name] == g else None
        s = dict(s)
        s[p.name] = g
        return s
    if isinstance(p, (Atom, IntLit)):
        return s if p == g else None
    if isinstance(p, Compound):
        if not isinstance(g, Compound) or g.name != p.name or len(g.args) != len(p.args):
            return None
        for a, b in zip(p.args, g.args):
            s = _match(a, b, s, pending)
            if s is None:
                return None
        return s
    if isinstance(p, ListTerm):
        if not isinstance(g, ListTerm):
            return None
        n = len(p.elements)
        if p.tail is None and len(g.elements) != n:
            return None
        if len(g.elements) < n:
            return None
        for a, b in zip(p.elements, g.elements):
            s = _match(a, b, s, pending)
            if s is None:
                return None
        if p.tail is not None:
            s = _match(p.tail, ListTerm(g.elements[n:]), s, pending)
        return s
    if isinstance(p, ArithExpr):
        try:
            v = evaluate(p, s)
        except _Unbound:
            if not isinstance(g, IntLit):
                return None
            pending.append(Unify(p, g))
            return s
        return s if v == g else None
    raise TypeError(f"not a term: {p!r}")


# -- relations ---------------------------------------------------------------

class _Relation:
    """Ordered fact tuples of one predicate with lazy per-column indexes."""

    def __init__(self, rows=()):
        self.rows = list(rows)
        self._index = {}

    def lookup(self, column: int, value) -> list:
        idx = self._index.get(column)
        if idx is None:
            idx = {}
            for r in self.rows:
                idx.setdefault(r[column], []).append(r)
            self._index[column] = idx
        return idx.get(value, [])


_EMPTY = _Relation()


@dataclass
class GroundFactSet:
    facts: dict = field(default_factory=dict)   # (name, arity) -> {args: None}
    deltas: list = field(default_factory=list)  # per iteration: [(name, args)]
    saturated: bool = False
    exhaustive: bool = True
    iterations: int = 0

    def __contains__(self, item) -> bool:
        name, args = item
        return tuple(args) in self.facts.get((name, len(args)), {})

    def __iter__(self) -> Iterator[tuple]:
        for (name, _), rows in self.facts.items():
            for args in rows:
                yield name, args

    def __len__(self) -> int:
        return sum(len(rows) for rows in self.facts.values())

    def of(self, name: str, arity: int) -> list:
        return list(self.facts.get((name, arity), {}))


@dataclass(frozen=True)
class QueryAnswer:
    derivable: bool
    witness: Optional[dict] = None
    saturated: bool = True
    exhaustive: bool = True

    @property
    def status(self) -> str:
        if self.derivable:
            return "derivable"
        return "not derivable" if self.saturated else "unknown"


# -- evaluation --------------------------------------------------------------

class _Rule:
    def __init__(self, clause: Clause, b: Bounds, head_vars=None):
        self.clause = clause
        self.head = clause.head
        self.calls, self.filters = [], []
        for item in clause.body:
            if isinstance(item, Call):
                self.calls.append(item)
            else:
                inner = item
                while isinstance(inner, Negation):
                    inner = inner.inner
                if isinstance(inner, Call):
                    raise NegatedPredicate(
                        f"negation of predicate {inner.predicate}/{inner.arity} is not supported",
                        item.span)
                self.filters.append(item)
        self.order = clause_variables(clause)
        self.head_vars = head_vars if head_vars is not None else (
            [v for a in self.head.args for v in _vars(a)] if self.head else [])
        self.max_depth = {v: b.term_depth for v in self.order}
        self.int_only = {v: False for v in self.order}
        if self.head is not None:
            for a in self.head.args:
                self._depths(a, 0, b.term_depth)
        for item in self.filters:
            self._ints(item)

    def _depths(self, t, level: int, limit: int):
        if isinstance(t, Var):
            self.max_depth[t.name] = min(self.max_depth[t.name], limit - level)
        elif isinstance(t, Compound):
            for a in t.args:
                self._depths(a, level + 1, limit)
        elif isinstance(t, ListTerm):
            for e in t.elements:
                self._depths(e, level + 1, limit)
            if t.tail is not None:
                self._depths(t.tail, level, limit)
        elif isinstance(t, ArithExpr):
            for v in _vars(t):
                self.int_only[v] = True

    def _ints(self, item):
        if isinstance(item, Negation):
            self._ints(item.inner)
        elif isinstance(item, ArithConstraint):
            for v in _vars(item.lhs) + _vars(item.rhs):
                self.int_only[v] = True
        else:
            for t in (item.lhs, item.rhs):
                for s in subterms(t):
                    if isinstance(s, ArithExpr):
                        for v in _vars(s):
                            self.int_only[v] = True


class _Evaluator:
    def __init__(self, db: Database, b: Bounds, cap: int = DEFAULT_CAP):
        self.b = b
        self.cap = cap
        self.funcs = collect_functions(db)
        self.feats = detect_features(db)
        self.infinite = (self.feats.uses_lists or self.feats.uses_integers
                         or any(f.arity > 0 for f in self.funcs))
        self.exhaustive = True
        self._universe = {}

    # universe helpers
    def universe(self, depth: int) -> list:
        if depth not in self._universe:
            self._universe[depth] = enumerate_universe(self.funcs, self.feats, self.b, self.cap, depth)
        return self._universe[depth]

    def candidates(self, rule: _Rule, v: str) -> list:
        if self.infinite:
            self.exhaustive = False
        if rule.int_only[v]:
            if not self.feats.uses_integers:
                return []
            lo, hi = self.b.int_range
            return [IntLit(i) for i in range(lo, hi + 1)]
        return self.universe(rule.max_depth[v])

    def in_universe(self, t) -> bool:
        if isinstance(t, IntLit):
            lo, hi = self.b.int_range
            return lo <= t.value <= hi
        if isinstance(t, Atom):
            return True
        if term_depth(t) > self.b.term_depth:
            return False
        return self._fits(t)

    def _fits(self, t) -> bool:
        if isinstance(t, IntLit):
            lo, hi = self.b.int_range
            return lo <= t.value <= hi
        if isinstance(t, Compound):
            return all(self._fits(a) for a in t.args)
        if isinstance(t, ListTerm):
            return len(t.elements) <= self.b.max_list_len and all(self._fits(e) for e in t.elements)
        return True

    def _bind_checked(self, s: dict, new: dict) -> Optional[dict]:
        for k, v in new.items():
            if k not in s and not self.in_universe(v):
                self.exhaustive = False
                return None
        return new

    # body item evaluation
    def holds(self, item, s: dict) -> Optional[bool]:
        """Truth of a ground filter; None when the instance is ill-typed."""
        if isinstance(item, Negation):
            r = self.holds(item.inner, s)
            return None if r is None else not r
        lv, rv = evaluate(item.lhs, s), evaluate(item.rhs, s)
        if lv is None or rv is None:
            return None
        if isinstance(item, Unify):
            return lv == rv
        if isinstance(item, TermDiseq):
            return lv != rv
        if not (isinstance(lv, IntLit) and isinstance(rv, IntLit)):
            return None
        x, y = lv.value, rv.value
        return {"#=": x == y, "#\\=": x != y, "#<": x < y, "#>": x > y,
                "#=<": x <= y, "#>=": x >= y}[item.op]

    def _try(self, item, s: dict):
        """Return (status, s, extra_pending) with status in true/false/wait."""
        try:
            r = self.holds(item, s)
            return ("true" if r else "false"), s, []
        except _Unbound:
            pass
        if isinstance(item, Unify):
            for a, b in ((item.lhs, item.rhs), (item.rhs, item.lhs)):
                try:
                    val = evaluate(b, s)
                except _Unbound:
                    continue
                if val is None:
                    return "false", s, []
                pending = []
                s2 = _match(a, val, s, pending)
                if s2 is None:
                    return "false", s, []
                s2 = self._bind_checked(s, s2)
                if s2 is None:
                    return "false", s, []
                return "true", s2, pending
        if isinstance(item, ArithConstraint) and item.op == "#=":
            for a, b in ((item.lhs, item.rhs), (item.rhs, item.lhs)):
                if isinstance(a, Var) and a.name not in s:
                    try:
                        val = evaluate(b, s)
                    except _Unbound:
                        continue
                    if not isinstance(val, IntLit):
                        return "false", s, []
                    if not self.in_universe(val):
                        self.exhaustive = False
                        return "false", s, []
                    s2 = dict(s)
                    s2[a.name] = val
                    return "true", s2, []
        return "wait", s, []

    def propagate(self, s: dict, pending: list):
        pending = list(pending)
        progress = True
        while progress and pending:
            progress = False
            rest = []
            for item in pending:
                try:
                    status, s, extra = self._try(item, s)
                except _Undefined:
                    self.exhaustive = False
                    return None, None
                if status == "false":
                    return None, None
                if status == "true":
                    progress = True
                    rest += extra
                else:
                    rest.append(item)
            pending = rest
        return s, pending

    def solutions(self, rule: _Rule, sources: list) -> Iterator[dict]:
        """Substitutions satisfying the body of ``rule``.

        ``sources[i]`` is the relation the i-th call is joined against.
        """
        def step(i, s, pending):
            s, pending = self.propagate(s, pending)
            if s is None:
                return
            if i == len(rule.calls):
                yield from self.finish(rule, s, pending)
                return
            call = rule.calls[i]
            rel = sources[i]
            rows = rel.rows
            for col, a in enumerate(call.args):
                try:
                    val = evaluate(a, s)
                except _Unbound:
                    continue
                except _Undefined:
                    self.exhaustive = False
                    return
                if val is None:
                    return
                rows = rel.lookup(col, val)
                break
            for row in rows:
                extra = []
                s2 = s
                for a, g in zip(call.args, row):
                    s2 = _match(a, g, s2, extra)
                    if s2 is None:
                        break
                if s2 is not None:
                    yield from step(i + 1, s2, pending + extra)

        yield from step(0, {}, rule.filters)

    def finish(self, rule: _Rule, s: dict, pending: list) -> Iterator[dict]:
        needed = dict.fromkeys(rule.head_vars)
        for item in pending:
            needed.update(dict.fromkeys(_item_vars(item)))
        free = [v for v in needed if v not in s]
        if not free and not pending:
            yield s
            return
        if not free:
            # pending items are ground now; propagate settled them or they failed
            return
        v = min(free, key=lambda name: (len(self.candidates(rule, name)), rule.order.index(name)))
        for c in self.candidates(rule, v):
            s2 = dict(s)
            s2[v] = c
            s3, rest = self.propagate(s2, pending)
            if s3 is not None:
                yield from self.finish(rule, s3, rest)

    def head_fact(self, rule: _Rule, s: dict) -> Optional[tuple]:
        try:
            args = tuple(evaluate(a, s) for a in rule.head.args)
        except _Undefined:
            self.exhaustive = False
            return None
        if any(a is None for a in args):
            return None
        if not all(self.in_universe(a) for a in args):
            self.exhaustive = False
            return None
        return args


def fixpoint(db: Database, b: Bounds, cap: int = DEFAULT_CAP,
             universe_from: Optional[Database] = None) -> GroundFactSet:
    """Semi-naive least fixpoint of the (query-free) program ``db``.

    Variables range over the bounded universe of ``universe_from``'s
    signature (default ``db``), so symbols that only a query mentions can
    be included.
    """
    if db.queries:
        raise ValueError("fixpoint expects a program without queries; use query_holds")
    return _fixpoint(db, b, cap, universe_from or db)[0]


def _fixpoint(db: Database, b: Bounds, cap: int, signature: Database):
    ev = _Evaluator(signature, b, cap)
    rules = [_Rule(c, b) for c in db.clauses]
    result = GroundFactSet()
    facts = result.facts

    def add(rule, s, new):
        args = ev.head_fact(rule, s)
        if args is None:
            return
        key = (rule.head.predicate, len(args))
        if args in facts.get(key, {}) or args in new.get(key, {}):
            return
        new.setdefault(key, {})[args] = None

    new = {}
    for rule in rules:
        if not rule.calls:
            for s in ev.solutions(rule, []):
                add(rule, s, new)
    iterations = 1
    while new:
        for key, rows in new.items():
            facts.setdefault(key, {}).update(rows)
        result.deltas.append([(k[0], args) for k, rows in new.items() for args in rows])
        if iterations >= b.max_iterations:
            break
        delta = {k: _Relation(rows) for k, rows in new.items()}
        full = {k: _Relation(rows) for k, rows in facts.items()}
        old = {k: _Relation(r for r in rows if r not in new.get(k, ())) for k, rows in facts.items()}
        new = {}
        for rule in rules:
            keys = [(c.predicate, c.arity) for c in rule.calls]
            for i, key in enumerate(keys):
                if key not in delta:
                    continue
                sources = [old.get(k, _EMPTY) for k in keys[:i]] + [delta[key]] + \
                          [full.get(k, _EMPTY) for k in keys[i + 1:]]
                for s in ev.solutions(rule, sources):
                    add(rule, s, new)
        iterations += 1
    result.saturated = not new
    result.exhaustive = ev.exhaustive
    result.iterations = iterations
    return result, ev


def _answer(facts: GroundFactSet, ev: _Evaluator, q: Clause, b: Bounds) -> QueryAnswer:
    names = [v for v in clause_variables(q) if not v.startswith("_$")]
    rule = _Rule(q, b, head_vars=names)
    sources = [_Relation(facts.facts.get((c.predicate, c.arity), {})) for c in rule.calls]
    for s in ev.solutions(rule, sources):
        return QueryAnswer(True, {v: s[v] for v in names}, facts.saturated, ev.exhaustive)
    return QueryAnswer(False, None, facts.saturated, ev.exhaustive)


def query_holds(db: Database, q: Clause, b: Bounds, cap: int = DEFAULT_CAP) -> QueryAnswer:
    """Decide whether some instance of query ``q`` holds in the bounded model of ``db``.

    Queries in ``db`` other than ``q`` are ignored; ``q`` need not belong to ``db``.
    """
    if q.kind is not ClauseKind.QUERY:
        raise ValueError("query_holds expects a query clause")
    signature = Database(db.clauses + (q,))
    facts, ev = _fixpoint(db.without_queries(), b, cap, signature)
    return _answer(facts, ev, q, b)


def program_holds(db: Database, b: Bounds, cap: int = DEFAULT_CAP) -> QueryAnswer:
    """Whether some query of ``db`` is derivable, matching the script's ``unsat``.

    Without queries nothing is derivable and only saturation is reported.
    """
    facts, ev = _fixpoint(db.without_queries(), b, cap, db)
    answers = [_answer(facts, ev, q, b) for q in db.queries]
    for a in answers:
        if a.derivable:
            return a
    return QueryAnswer(False, None, facts.saturated, ev.exhaustive)
