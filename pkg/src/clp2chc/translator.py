"""Translation of Prolog clauses to constrained Horn clauses over one ADT.

Every Prolog term becomes a value of the universal datatype ``U``.  Lists
are wrapped with ``aList`` around the auxiliary sort ``L`` (``nil`` /
``cons``) and integers with ``anInt``.  Terms translate to a pair
(SMT term, side conditions); side conditions are the ``aList`` / ``anInt``
tester applications that a clause assumes in its antecedent.

With ``peephole`` enabled (the default) the results are simplified as they
are built: ``(theInt (anInt e))`` becomes ``e``, ``(theList (aList l))``
becomes ``l``, testers applied to a matching constructor are dropped, and a
positive ``#=`` with one wrapped side becomes a plain ``=`` over ``U``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .signatures import (
    FeatureSet, NameTable, build_name_table, collect_functions,
    collect_predicates, detect_features,
)
from .smtlib import (
    FALSE, Apply, Assert, CheckSat, Constructor, DeclareDatatypes, DeclareFun,
    Forall, IndexedTester, IntConst, Script, SetLogic, SmtTerm, Symbol, app,
)
from .syntax import (
    ArithConstraint, ArithExpr, Atom, Call, Clause, Compound,
    Database, Diagnostic, IntLit, ListTerm, Negation, Span, TermDiseq, Unify,
    Var, clause_variables, subterms,
)

U, L = "U", "L"
DEFAULT_CONSTRUCTOR = "u$default"

_ARITH = {"+": "+", "-": "-", "*": "*", "/": "div", "mod": "mod"}
_COMPARE = {"#=": "=", "#>": ">", "#>=": ">=", "#<": "<", "#=<": "<="}


class TranslationError(ValueError):
    def __init__(self, message: str, span: Optional[Span] = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class NegatedPredicate(TranslationError):
    pass


@dataclass(frozen=True)
class IsList:
    term: SmtTerm

    def to_smt(self) -> SmtTerm:
        return IndexedTester("aList", self.term)


@dataclass(frozen=True)
class IsInt:
    term: SmtTerm

    def to_smt(self) -> SmtTerm:
        return IndexedTester("anInt", self.term)


@dataclass(frozen=True)
class JudgementResult:
    translated: SmtTerm
    conditions: tuple = ()


def _union(*groups) -> tuple:
    return tuple(dict.fromkeys(c for g in groups for c in g))


def _wrapped(t: SmtTerm, ctor: str) -> bool:
    return isinstance(t, Apply) and t.head == Symbol(ctor) and len(t.args) == 1


class _Rules:
    """The translation judgements, parameterized by the name table."""

    def __init__(self, table: NameTable, peephole: bool = True):
        self.table = table
        self.peephole = peephole

    # helpers that apply the literal-unwrapping rewrite when enabled
    def the_int(self, t: SmtTerm) -> SmtTerm:
        if self.peephole and _wrapped(t, "anInt"):
            return t.args[0]
        return app("theInt", t)

    def the_list(self, t: SmtTerm) -> SmtTerm:
        if self.peephole and _wrapped(t, "aList"):
            return t.args[0]
        return app("theList", t)

    def is_int(self, t: SmtTerm) -> tuple:
        if self.peephole and _wrapped(t, "anInt"):
            return ()
        return (IsInt(t),)

    def is_list(self, t: SmtTerm) -> tuple:
        if self.peephole and _wrapped(t, "aList"):
            return ()
        return (IsList(t),)

    # terms
    def term(self, t) -> JudgementResult:
        if isinstance(t, Var):
            return JudgementResult(Symbol(self.table.variable(t.name)))
        if isinstance(t, Atom):
            return JudgementResult(Symbol(self.table.constructor(t.name, 0)))
        if isinstance(t, Compound):
            subs = [self.term(a) for a in t.args]
            ctor = self.table.constructor(t.name, len(t.args))
            return JudgementResult(app(ctor, *(s.translated for s in subs)),
                                   _union(*(s.conditions for s in subs)))
        if isinstance(t, ListTerm):
            return self.list_term(t)
        if isinstance(t, IntLit):
            if t.value < 0:
                return JudgementResult(app("anInt", app("-", IntConst(-t.value))))
            return JudgementResult(app("anInt", IntConst(t.value)))
        if isinstance(t, ArithExpr):
            return self.arith(t)
        raise TypeError(f"not a term: {t!r}")

    def list_term(self, t: ListTerm) -> JudgementResult:
        subs = [self.term(e) for e in t.elements]
        conds = [s.conditions for s in subs]
        if t.tail is None:
            acc = Symbol("nil")
        else:
            tail = self.term(t.tail)
            conds.append(tail.conditions)
            conds.append(self.is_list(tail.translated))
            acc = self.the_list(tail.translated)
        for s in reversed(subs):
            acc = app("cons", s.translated, acc)
        return JudgementResult(app("aList", acc), _union(*conds))

    def arith(self, t: ArithExpr) -> JudgementResult:
        if t.unary:
            (x,) = t.operands
            if isinstance(x, IntLit):
                return JudgementResult(app("anInt", app("-", IntConst(x.value))))
            s = self.term(x)
            return JudgementResult(app("anInt", app("-", self.the_int(s.translated))),
                                   _union(s.conditions, self.is_int(s.translated)))
        a, b = (self.term(x) for x in t.operands)
        body = app(_ARITH[t.op], self.the_int(a.translated), self.the_int(b.translated))
        return JudgementResult(
            app("anInt", body),
            _union(a.conditions, b.conditions, self.is_int(a.translated), self.is_int(b.translated)),
        )

    # body items
    def item(self, b, positive: bool = True) -> JudgementResult:
        if isinstance(b, Call):
            subs = [self.term(a) for a in b.args]
            pred = self.table.predicate(b.predicate, len(b.args))
            return JudgementResult(app(pred, *(s.translated for s in subs)),
                                   _union(*(s.conditions for s in subs)))
        if isinstance(b, Unify):
            s, t = self.term(b.lhs), self.term(b.rhs)
            return JudgementResult(app("=", s.translated, t.translated),
                                   _union(s.conditions, t.conditions))
        if isinstance(b, TermDiseq):
            s, t = self.term(b.lhs), self.term(b.rhs)
            return JudgementResult(app("not", app("=", s.translated, t.translated)),
                                   _union(s.conditions, t.conditions))
        if isinstance(b, Negation):
            if isinstance(b.inner, Call):
                raise NegatedPredicate(
                    f"negation of predicate {b.inner.predicate}/{b.inner.arity} leaves the Horn fragment",
                    b.span)
            inner = self.item(b.inner, positive=not positive)
            return JudgementResult(app("not", inner.translated), inner.conditions)
        if isinstance(b, ArithConstraint):
            return self.constraint(b, positive)
        raise TypeError(f"not a body item: {b!r}")

    def constraint(self, b: ArithConstraint, positive: bool) -> JudgementResult:
        s, t = self.term(b.lhs), self.term(b.rhs)
        x, y = s.translated, t.translated
        conds = _union(s.conditions, t.conditions)
        if b.op == "#=" and positive and self.peephole:
            wx, wy = _wrapped(x, "anInt"), _wrapped(y, "anInt")
            if wx and wy:
                return JudgementResult(app("=", x.args[0], y.args[0]), conds)
            if wx or wy:
                # (= v (anInt e)) already forces v to be an integer
                return JudgementResult(app("=", x, y), conds)
        extra = _union(self.is_int(x), self.is_int(y))
        if b.op == "#\\=":
            body = app("not", app("=", self.the_int(x), self.the_int(y)))
        else:
            body = app(_COMPARE[b.op], self.the_int(x), self.the_int(y))
        return JudgementResult(body, _union(conds, extra))


def translate_term(t, table: NameTable, peephole: bool = True) -> JudgementResult:
    return _Rules(table, peephole).term(t)


def translate_body_item(b, table: NameTable, peephole: bool = True) -> JudgementResult:
    return _Rules(table, peephole).item(b)


def _conj(items: list) -> Optional[SmtTerm]:
    if not items:
        return None
    if len(items) == 1:
        return items[0]
    return Apply(Symbol("and"), tuple(items))


def translate_clause(c: Clause, table: NameTable, peephole: bool = True) -> Assert:
    """One ``assert`` per clause.

    Facts assume their side conditions; rules and queries list the body
    translations first, then the head conditions, then the body conditions.
    """
    rules = _Rules(table, peephole)
    try:
        head = rules.item(c.head) if c.head is not None else JudgementResult(FALSE)
        body = [rules.item(b) for b in c.body]
    except TranslationError as exc:
        if exc.span is None:
            exc.span = c.span
        raise
    conds = _union(head.conditions, *(b.conditions for b in body))
    antecedent = _conj([b.translated for b in body] + [x.to_smt() for x in conds])
    formula = head.translated if antecedent is None else app("=>", antecedent, head.translated)
    names = [table.variable(v) for v in clause_variables(c)]
    if names:
        formula = Forall(tuple((n, U) for n in names), formula)
    return Assert(formula)


def build_declarations(funcs, preds, feats: FeatureSet, table: NameTable) -> list:
    ctors = []
    if feats.uses_integers:
        ctors.append(Constructor("anInt", (("theInt", "Int"),)))
    if feats.uses_lists:
        ctors.append(Constructor("aList", (("theList", L),)))
    for f in funcs:
        name = table.constructor(f.name, f.arity)
        sels = tuple((table.selector(f.name, f.arity, i), U) for i in range(1, f.arity + 1))
        ctors.append(Constructor(name, sels))
    if not any(not c.selectors or c.name in ("anInt", "aList") for c in ctors):
        # U needs a base case to be well-founded
        ctors.append(Constructor(DEFAULT_CONSTRUCTOR))
    sorts = [(U, tuple(ctors))]
    if feats.uses_lists:
        sorts.append((L, (Constructor("nil"), Constructor("cons", (("head", U), ("tail", L))))))
    cmds = [DeclareDatatypes(tuple(sorts))]
    for p in preds:
        cmds.append(DeclareFun(table.predicate(p.name, p.arity), (U,) * p.arity, "Bool"))
    return cmds


def translate_program(db: Database, peephole: bool = True, force_features: bool = False) -> Script:
    funcs = collect_functions(db)
    preds = collect_predicates(db)
    feats = FeatureSet(True, True) if force_features else detect_features(db)
    table = build_name_table(db, funcs, preds)
    cmds = [SetLogic("HORN")]
    cmds += build_declarations(funcs, preds, feats, table)
    cmds += [translate_clause(c, table, peephole) for c in db.clauses]
    cmds.append(CheckSat())
    return Script(tuple(cmds))


def occurs_check_notes(db: Database) -> list:
    """Notes for equations ``X = t`` where ``X`` also occurs inside ``t``.

    Such equations have no finite solution, unlike in Prolog without an
    occurs check.
    """
    notes = []
    for c in db.clauses:
        items = list(c.body)
        while items:
            item = items.pop(0)
            if isinstance(item, Negation):
                items.append(item.inner)
                continue
            if not isinstance(item, Unify):
                continue
            for v, other in ((item.lhs, item.rhs), (item.rhs, item.lhs)):
                if isinstance(v, Var) and not isinstance(other, Var) and any(
                        isinstance(s, Var) and s.name == v.name for s in subterms(other)):
                    notes.append(Diagnostic(
                        "note",
                        f"variable {v.name} occurs on both sides of '='; this equation has no finite solution",
                        item.span or c.span))
                    break
    return notes
