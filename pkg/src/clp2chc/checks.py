"""Static checks over emitted scripts: sorts and Horn-clause shape."""

from __future__ import annotations

from .smtlib import (
    Apply, Assert, DeclareDatatypes, DeclareFun, Forall, IndexedTester,
    IntConst, Script, Symbol,
)


class SortError(ValueError):
    pass


class HornShapeError(ValueError):
    pass


_INT_OPS = {"+", "-", "*", "div", "mod", "abs"}
_INT_RELS = {"<", "<=", ">", ">="}


class _Signature:
    def __init__(self, script: Script):
        self.sorts = {"Int", "Bool"}
        self.funs = {}        # name -> (arg sorts, result sort)
        self.testable = {}    # constructor -> datatype sort
        self.predicates = set()
        for cmd in script.commands:
            if isinstance(cmd, DeclareDatatypes):
                self.sorts.update(name for name, _ in cmd.sorts)
        for cmd in script.commands:
            if isinstance(cmd, DeclareDatatypes):
                for sort, ctors in cmd.sorts:
                    for c in ctors:
                        arg_sorts = tuple(s for _, s in c.selectors)
                        for s in arg_sorts:
                            self._known(s)
                        self._declare(c.name, arg_sorts, sort)
                        self.testable[c.name] = sort
                        for sel, s in c.selectors:
                            self._declare(sel, (sort,), s)
            elif isinstance(cmd, DeclareFun):
                for s in cmd.arg_sorts + (cmd.result,):
                    self._known(s)
                self._declare(cmd.name, cmd.arg_sorts, cmd.result)
                if cmd.result == "Bool":
                    self.predicates.add(cmd.name)

    def _known(self, sort):
        if sort not in self.sorts:
            raise SortError(f"undeclared sort {sort}")

    def _declare(self, name, args, result):
        if name in self.funs:
            raise SortError(f"symbol {name} declared twice")
        self.funs[name] = (tuple(args), result)


def _sort_of(t, sig: _Signature, env: dict) -> str:
    if isinstance(t, IntConst):
        return "Int"
    if isinstance(t, Symbol):
        if t.name in env:
            return env[t.name]
        if t.name in ("true", "false"):
            return "Bool"
        if t.name in sig.funs and not sig.funs[t.name][0]:
            return sig.funs[t.name][1]
        raise SortError(f"free or unknown symbol {t.name}")
    if isinstance(t, IndexedTester):
        if t.constructor not in sig.testable:
            raise SortError(f"tester for unknown constructor {t.constructor}")
        arg = _sort_of(t.arg, sig, env)
        if arg != sig.testable[t.constructor]:
            raise SortError(f"tester (_ is {t.constructor}) applied to sort {arg}")
        return "Bool"
    if isinstance(t, Forall):
        inner = dict(env)
        for name, sort in t.bindings:
            sig._known(sort)
            inner[name] = sort
        if _sort_of(t.body, sig, inner) != "Bool":
            raise SortError("forall body is not Boolean")
        return "Bool"
    if isinstance(t, Apply):
        if not isinstance(t.head, Symbol):
            raise SortError("higher-order application")
        f = t.head.name
        args = [_sort_of(a, sig, env) for a in t.args]
        if f in _INT_OPS:
            if any(a != "Int" for a in args) or (f in ("div", "mod") and len(args) != 2):
                raise SortError(f"bad operands for {f}: {args}")
            return "Int"
        if f in _INT_RELS:
            if len(args) != 2 or any(a != "Int" for a in args):
                raise SortError(f"bad operands for {f}: {args}")
            return "Bool"
        if f in ("=", "distinct"):
            if len(args) < 2 or len(set(args)) != 1:
                raise SortError(f"mismatched operands for {f}: {args}")
            return "Bool"
        if f in ("and", "or", "not", "=>"):
            if any(a != "Bool" for a in args) or (f == "not" and len(args) != 1):
                raise SortError(f"bad operands for {f}: {args}")
            return "Bool"
        if f not in sig.funs:
            raise SortError(f"unknown function {f}")
        expected, result = sig.funs[f]
        if tuple(args) != expected:
            raise SortError(f"{f} expects {expected}, got {tuple(args)}")
        return result
    raise SortError(f"not a term: {t!r}")


def check_sorts(script: Script) -> None:
    """Raise :class:`SortError` unless every assertion is a closed Boolean term."""
    sig = _Signature(script)
    for cmd in script.commands:
        if isinstance(cmd, Assert) and _sort_of(cmd.term, sig, {}) != "Bool":
            raise SortError("assertion is not Boolean")


def _mentions_predicate(t, preds) -> bool:
    if isinstance(t, Symbol):
        return t.name in preds
    if isinstance(t, Apply):
        return _mentions_predicate(t.head, preds) or any(_mentions_predicate(a, preds) for a in t.args)
    if isinstance(t, IndexedTester):
        return _mentions_predicate(t.arg, preds)
    if isinstance(t, Forall):
        return True
    return False


def _is_atom(t, preds) -> bool:
    if isinstance(t, Symbol):
        return t.name in preds
    return (isinstance(t, Apply) and isinstance(t.head, Symbol) and t.head.name in preds
            and not any(_mentions_predicate(a, preds) for a in t.args))


def check_horn_shape(script: Script) -> None:
    """Raise :class:`HornShapeError` unless every assertion is a Horn clause.

    Accepted shapes: ``(p ts)``, ``(forall (..) (p ts))``,
    ``(forall (..) (=> body head))`` with ``head`` a predicate application
    or ``false`` and ``body`` a conjunction of predicate applications and
    predicate-free constraints.
    """
    preds = _Signature(script).predicates
    for cmd in script.commands:
        if not isinstance(cmd, Assert):
            continue
        t = cmd.term
        if isinstance(t, Forall):
            t = t.body
        if isinstance(t, Apply) and t.head == Symbol("=>"):
            if len(t.args) != 2:
                raise HornShapeError("implication must have two operands")
            body, head = t.args
            if not (head == Symbol("false") or _is_atom(head, preds)):
                raise HornShapeError(f"clause head is not a predicate application: {head}")
            conjuncts = body.args if isinstance(body, Apply) and body.head == Symbol("and") else (body,)
            for c in conjuncts:
                if not _is_atom(c, preds) and _mentions_predicate(c, preds):
                    raise HornShapeError(f"body literal mixes predicates and logic: {c}")
        elif not _is_atom(t, preds):
            raise HornShapeError(f"assertion is not a Horn clause: {t}")
