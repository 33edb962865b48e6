"""Lexer, parser and printer for the supported Prolog / CLP(Z) subset.

The accepted language is plain Prolog clauses over variables, atoms,
compound terms, lists and non-negative integer literals, with CLP(Z)
arithmetic (``+ - * / mod``, unary minus) and the comparison operators
``#= #\\= #< #> #=< #>=``.  ``is`` and ``=:=`` are read as ``#=``.
Term equality ``=``, disequality ``\\=`` / ``=\\=`` and negation ``\\+``
are supported in clause bodies.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    start: int
    end: int

    def __str__(self):
        return f"{self.line}:{self.column}"


def _span_field():
    return field(default=None, compare=False, repr=False)


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span_field()

    @property
    def anonymous(self) -> bool:
        return self.name.startswith("_$")


@dataclass(frozen=True)
class Atom:
    name: str
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Compound:
    name: str
    args: tuple
    span: Optional[Span] = _span_field()

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound terms need at least one argument; use Atom")


@dataclass(frozen=True)
class ListTerm:
    """``[e1, ..., en]`` or, with ``tail`` set, ``[e1, ..., en | tail]``."""

    elements: tuple
    tail: Optional["Term"] = None
    span: Optional[Span] = _span_field()

    def __post_init__(self):
        if self.tail is not None and not self.elements:
            raise ValueError("a list with a tail needs at least one element")


@dataclass(frozen=True)
class IntLit:
    value: int
    span: Optional[Span] = _span_field()


ARITH_OPS = ("+", "-", "*", "/", "mod")


@dataclass(frozen=True)
class ArithExpr:
    """Binary arithmetic, or unary minus when ``operands`` has one element."""

    op: str
    operands: tuple
    span: Optional[Span] = _span_field()

    @property
    def unary(self) -> bool:
        return len(self.operands) == 1


Term = Union[Var, Atom, Compound, ListTerm, IntLit, ArithExpr]


# -- body items and clauses --------------------------------------------------

@dataclass(frozen=True)
class Call:
    predicate: str
    args: tuple = ()
    span: Optional[Span] = _span_field()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Unify:
    lhs: Term
    rhs: Term
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class TermDiseq:
    lhs: Term
    rhs: Term
    span: Optional[Span] = _span_field()


@dataclass(frozen=True)
class Negation:
    inner: "BodyItem"
    span: Optional[Span] = _span_field()


COMPARISON_OPS = ("#=", "#\\=", "#<", "#>", "#=<", "#>=")


@dataclass(frozen=True)
class ArithConstraint:
    op: str
    lhs: Term
    rhs: Term
    span: Optional[Span] = _span_field()


BodyItem = Union[Call, Unify, TermDiseq, Negation, ArithConstraint]


class ClauseKind(enum.Enum):
    FACT = "fact"
    RULE = "rule"
    QUERY = "query"


@dataclass(frozen=True)
class Clause:
    kind: ClauseKind
    head: Optional[Call]
    body: tuple = ()
    span: Optional[Span] = _span_field()

    def __post_init__(self):
        if self.kind is ClauseKind.QUERY:
            ok = self.head is None and bool(self.body)
        elif self.kind is ClauseKind.FACT:
            ok = self.head is not None and not self.body
        else:
            ok = self.head is not None and bool(self.body)
        if not ok:
            raise ValueError(f"malformed {self.kind.value} clause")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: Optional[Span] = None

    def format(self, filename: str = "<input>") -> str:
        line, col = (self.span.line, self.span.column) if self.span else (1, 1)
        return f"{filename}:{line}:{col}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Database:
    clauses: tuple = ()
    diagnostics: tuple = field(default=(), compare=False, repr=False)

    @property
    def queries(self) -> tuple:
        return tuple(c for c in self.clauses if c.kind is ClauseKind.QUERY)

    def without_queries(self) -> "Database":
        kept = tuple(c for c in self.clauses if c.kind is not ClauseKind.QUERY)
        return Database(kept, self.diagnostics)


# -- errors ------------------------------------------------------------------

class PrologSyntaxError(ValueError):
    def __init__(self, message: str, span: Optional[Span] = None, expected=()):
        self.message = message
        self.span = span
        self.expected = tuple(expected)
        where = f"{span}: " if span else ""
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


class LexError(PrologSyntaxError):
    pass


class UnsupportedConstruct(PrologSyntaxError):
    pass


# -- tokenizer ---------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # atom, var, int, punct, op, end
    value: str
    span: Span
    quoted: bool = False


_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
_OPERATORS = {
    ":-", "?-", "=", "\\=", "=\\=", "\\+", "#=", "#\\=", "#<", "#>", "#=<",
    "#>=", "=:=", "+", "-", "*", "/",
}
_NAME_RE = re.compile(r"[A-Za-z0-9_]*")
_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"', "`": "`"}


def tokenize(text: str) -> list:
    """Split ``text`` into tokens; comments and layout are dropped."""
    return list(_tokens(text))


def _tokens(text: str) -> Iterator[Token]:
    pos, line, line_start = 0, 1, 0
    n = len(text)

    def span(start):
        return Span(line, start - line_start + 1, start, pos)

    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line, line_start = line + 1, pos
            continue
        if ch.isspace():
            pos += 1
            continue
        if ch == "%":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        if text.startswith("/*", pos):
            end = text.find("*/", pos + 2)
            if end < 0:
                raise LexError("unterminated block comment", Span(line, pos - line_start + 1, pos, n))
            for i in range(pos, end):
                if text[i] == "\n":
                    line, line_start = line + 1, i + 1
            pos = end + 2
            continue
        start = pos
        if ch.isalpha() or ch == "_":
            if not ch.isascii():
                raise LexError(f"illegal character {ch!r}", Span(line, pos - line_start + 1, pos, pos + 1))
            m = _NAME_RE.match(text, pos)
            pos = m.end()
            kind = "var" if (ch.isupper() or ch == "_") else "atom"
            yield Token(kind, text[start:pos], span(start))
        elif ch.isdigit():
            while pos < n and text[pos].isdigit():
                pos += 1
            yield Token("int", text[start:pos], span(start))
        elif ch == "'":
            pos += 1
            chars = []
            while True:
                if pos >= n:
                    raise LexError("unterminated quoted atom", Span(line, start - line_start + 1, start, n))
                c = text[pos]
                if c == "'":
                    if text.startswith("''", pos):
                        chars.append("'")
                        pos += 2
                        continue
                    pos += 1
                    break
                if c == "\\" and pos + 1 < n and text[pos + 1] in _ESCAPES:
                    chars.append(_ESCAPES[text[pos + 1]])
                    pos += 2
                    continue
                if c == "\n":
                    raise LexError("unterminated quoted atom", Span(line, start - line_start + 1, start, pos))
                chars.append(c)
                pos += 1
            yield Token("atom", "".join(chars), span(start), quoted=True)
        elif ch in "()[],|;":
            pos += 1
            yield Token("punct", ch, span(start))
        elif ch == "!":
            pos += 1
            yield Token("op", "!", span(start))
        elif ch in _SYMBOL_CHARS:
            while pos < n and text[pos] in _SYMBOL_CHARS:
                pos += 1
            run = text[start:pos]
            if run == "." and (pos >= n or text[pos].isspace() or text[pos] == "%"):
                yield Token("end", ".", span(start))
            elif run in _OPERATORS:
                yield Token("op", run, span(start))
            else:
                raise LexError(f"unknown operator {run!r}", span(start))
        else:
            raise LexError(f"illegal character {ch!r}", Span(line, pos - line_start + 1, pos, pos + 1))


# -- parser ------------------------------------------------------------------

# name/arity pairs that are Prolog builtins we cannot translate
UNSUPPORTED_BUILTINS = {
    ("write", 1), ("writeln", 1), ("print", 1), ("nl", 0), ("format", 1),
    ("format", 2), ("findall", 3), ("bagof", 3), ("setof", 3), ("forall", 2),
    ("assert", 1), ("asserta", 1), ("assertz", 1), ("retract", 1),
    ("call", 1), ("call", 2), ("call", 3), ("not", 1), ("once", 1),
    ("atom", 1), ("number", 1), ("integer", 1), ("var", 1), ("nonvar", 1),
    ("is_list", 1), ("functor", 3), ("arg", 3), ("copy_term", 2),
    ("atom_codes", 2), ("atom_length", 2), ("msort", 2), ("sort", 2),
    ("true", 0), ("fail", 0), ("false", 0), ("halt", 0), ("halt", 1),
    ("label", 1), ("labeling", 2), ("use_module", 1), ("use_module", 2),
}

_UNIFY_OPS = {"=": Unify, "\\=": TermDiseq, "=\\=": TermDiseq}
_ARITH_ALIASES = {"is": "#=", "=:=": "#="}


def _join(a: Optional[Span], b: Optional[Span]) -> Optional[Span]:
    if a is None or b is None:
        return a or b
    return Span(a.line, a.column, a.start, b.end)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.anon = 0
        self.diagnostics = []

    # token helpers
    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise PrologSyntaxError("unexpected end of input", self._eof_span())
        self.pos += 1
        return tok

    def _eof_span(self) -> Span:
        lines = self.text.split("\n")
        return Span(len(lines), len(lines[-1]) + 1, len(self.text), len(self.text))

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (value is None or tok.value == value)

    def expect(self, kind: str, value: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or tok.value != value:
            self.fail(f"unexpected {self._describe(tok)}", [repr(value)])
        return self.next()

    def fail(self, message, expected=()):
        tok = self.peek()
        raise PrologSyntaxError(message, tok.span if tok else self._eof_span(), expected)

    @staticmethod
    def _describe(tok) -> str:
        return "end of input" if tok is None else f"{tok.value!r}"

    # grammar
    def program(self) -> Database:
        clauses = []
        while self.peek() is not None:
            c = self.clause()
            if c is not None:
                clauses.append(c)
        self._check_builtins(clauses)
        return Database(tuple(clauses), tuple(self.diagnostics))

    def clause(self) -> Optional[Clause]:
        first = self.peek()
        if self.at("op", ":-"):
            self.next()
            self.body()
            end = self.expect("end", ".")
            self.diagnostics.append(
                Diagnostic("warning", "directive ignored", _join(first.span, end.span)))
            return None
        if self.at("op", "?-"):
            self.next()
            items = self.body()
            end = self.expect("end", ".")
            return Clause(ClauseKind.QUERY, None, items, _join(first.span, end.span))
        head = self.head()
        if self.at("end"):
            end = self.next()
            return Clause(ClauseKind.FACT, head, (), _join(first.span, end.span))
        if self.at("op", ":-"):
            self.next()
            items = self.body()
            end = self.expect("end", ".")
            return Clause(ClauseKind.RULE, head, items, _join(first.span, end.span))
        self.fail(f"unexpected {self._describe(self.peek())} after clause head", ["'.'", "':-'"])

    def head(self) -> Call:
        tok = self.peek()
        t = self.expr()
        if isinstance(t, Atom):
            return Call(t.name, (), t.span)
        if isinstance(t, Compound):
            return Call(t.name, t.args, t.span)
        raise PrologSyntaxError("clause head must be an atom or compound term",
                                tok.span if tok else None)

    def body(self) -> tuple:
        items = [self.body_item()]
        while self.at("punct", ","):
            self.next()
            items.append(self.body_item())
        if self.at("punct", ";"):
            raise UnsupportedConstruct("disjunction ';' is not supported", self.peek().span)
        return tuple(items)

    def body_item(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input", ["goal"])
        if tok.kind == "op" and tok.value == "!":
            raise UnsupportedConstruct("cut '!' is not supported", tok.span)
        if tok.kind == "op" and tok.value == "\\+":
            self.next()
            inner = self._parenthesized_item()
            if inner is None:
                inner = self.body_item()
            return Negation(inner, _join(tok.span, inner.span))
        lhs = self.expr()
        nxt = self.peek()
        if nxt is not None and nxt.kind == "op" and nxt.value in _UNIFY_OPS:
            self.next()
            rhs = self.expr()
            return _UNIFY_OPS[nxt.value](lhs, rhs, _join(lhs.span, rhs.span))
        if nxt is not None and (
            (nxt.kind == "op" and (nxt.value in COMPARISON_OPS or nxt.value == "=:="))
            or (nxt.kind == "atom" and nxt.value == "is" and not nxt.quoted)
        ):
            self.next()
            rhs = self.expr()
            op = _ARITH_ALIASES.get(nxt.value, nxt.value)
            return ArithConstraint(op, lhs, rhs, _join(lhs.span, rhs.span))
        if isinstance(lhs, Atom):
            return Call(lhs.name, (), lhs.span)
        if isinstance(lhs, Compound):
            return Call(lhs.name, lhs.args, lhs.span)
        raise PrologSyntaxError("goal must be a predicate call or a constraint",
                                tok.span, ["predicate", "constraint"])

    def _parenthesized_item(self):
        """Try ``( item )`` after ``\\+``; backtrack when that reading fails."""
        if not self.at("punct", "("):
            return None
        saved, saved_anon, saved_diag = self.pos, self.anon, len(self.diagnostics)
        try:
            self.next()
            inner = self.body_item()
            self.expect("punct", ")")
            nxt = self.peek()
            if nxt is None or nxt.kind == "end" or (nxt.kind == "punct" and nxt.value in ",)"):
                return inner
        except PrologSyntaxError as exc:
            if isinstance(exc, UnsupportedConstruct):
                raise
        self.pos, self.anon = saved, saved_anon
        del self.diagnostics[saved_diag:]
        return None

    def expr(self):
        left = self.mul()
        while self.at("op", "+") or self.at("op", "-"):
            op = self.next().value
            right = self.mul()
            left = ArithExpr(op, (left, right), _join(left.span, right.span))
        return left

    def mul(self):
        left = self.unary()
        while True:
            tok = self.peek()
            if tok is None:
                return left
            if tok.kind == "op" and tok.value in ("*", "/"):
                op = tok.value
            elif tok.kind == "atom" and tok.value == "mod" and not tok.quoted:
                op = "mod"
            else:
                return left
            self.next()
            right = self.unary()
            left = ArithExpr(op, (left, right), _join(left.span, right.span))

    def unary(self):
        if self.at("op", "-"):
            tok = self.next()
            operand = self.unary()
            return ArithExpr("-", (operand,), _join(tok.span, operand.span))
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input", ["term"])
        if tok.kind == "int":
            self.next()
            return IntLit(int(tok.value), tok.span)
        if tok.kind == "var":
            self.next()
            if tok.value == "_":
                self.anon += 1
                return Var(f"_${self.anon}", tok.span)
            return Var(tok.value, tok.span)
        if tok.kind == "atom":
            self.next()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "punct" and nxt.value == "(" and nxt.span.start == tok.span.end:
                self.next()
                args = [self.expr()]
                while self.at("punct", ","):
                    self.next()
                    args.append(self.expr())
                close = self.expect("punct", ")")
                return Compound(tok.value, tuple(args), _join(tok.span, close.span))
            return Atom(tok.value, tok.span)
        if tok.kind == "punct" and tok.value == "[":
            return self.list_term()
        if tok.kind == "punct" and tok.value == "(":
            self.next()
            inner = self.expr()
            self.expect("punct", ")")
            return inner
        if tok.kind == "op" and tok.value == "!":
            raise UnsupportedConstruct("cut '!' is not supported", tok.span)
        self.fail(f"unexpected {self._describe(tok)}", ["term"])

    def list_term(self):
        open_ = self.expect("punct", "[")
        if self.at("punct", "]"):
            close = self.next()
            return ListTerm((), None, _join(open_.span, close.span))
        elements = [self.expr()]
        while self.at("punct", ","):
            self.next()
            elements.append(self.expr())
        tail = None
        if self.at("punct", "|"):
            self.next()
            tail = self.expr()
        if not self.at("punct", "]"):
            self.fail(f"unexpected {self._describe(self.peek())} in list", ["','", "'|'", "']'"])
        close = self.next()
        return ListTerm(tuple(elements), tail, _join(open_.span, close.span))

    def _check_builtins(self, clauses):
        defined = {(c.head.predicate, c.head.arity) for c in clauses if c.head is not None}
        for c in clauses:
            for item in c.body:
                while isinstance(item, Negation):
                    item = item.inner
                if isinstance(item, Call):
                    key = (item.predicate, item.arity)
                    if key in UNSUPPORTED_BUILTINS and key not in defined:
                        raise UnsupportedConstruct(
                            f"builtin {item.predicate}/{item.arity} is not supported", item.span)


def parse_program(text: str) -> Database:
    """Parse Prolog source into a :class:`Database`.

    Directives (``:- Goal.``) are dropped and reported as warnings in
    ``Database.diagnostics``.
    """
    return _Parser(text).program()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    if p.peek() is not None:
        p.fail(f"unexpected {p._describe(p.peek())} after term")
    return t


# -- printer -----------------------------------------------------------------

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_PREC = {"+": 500, "-": 500, "*": 400, "/": 400, "mod": 400}


def format_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name) and name not in ("mod", "is"):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t") + "'"


def _prec(t) -> int:
    if isinstance(t, ArithExpr):
        return 200 if t.unary else _PREC[t.op]
    return 0


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return "_" if t.anonymous else t.name
    if isinstance(t, Atom):
        return format_atom(t.name)
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, Compound):
        return f"{format_atom(t.name)}({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, ListTerm):
        inner = ", ".join(format_term(e) for e in t.elements)
        if t.tail is not None:
            inner += "|" + format_term(t.tail)
        return f"[{inner}]"
    if isinstance(t, ArithExpr):
        if t.unary:
            (x,) = t.operands
            body = format_term(x)
            return f"-({body})" if isinstance(x, ArithExpr) else f"-{body}"
        left, right = t.operands
        own = _PREC[t.op]
        ls, rs = format_term(left), format_term(right)
        if _prec(left) > own:
            ls = f"({ls})"
        if _prec(right) >= own and not (isinstance(right, ArithExpr) and right.unary):
            rs = f"({rs})"
        return f"{ls} {t.op} {rs}"
    raise TypeError(f"not a term: {t!r}")


def format_body_item(item: BodyItem) -> str:
    if isinstance(item, Call):
        return format_term(Compound(item.predicate, item.args) if item.args else Atom(item.predicate))
    if isinstance(item, Unify):
        return f"{format_term(item.lhs)} = {format_term(item.rhs)}"
    if isinstance(item, TermDiseq):
        return f"{format_term(item.lhs)} \\= {format_term(item.rhs)}"
    if isinstance(item, ArithConstraint):
        return f"{format_term(item.lhs)} {item.op} {format_term(item.rhs)}"
    if isinstance(item, Negation):
        return f"\\+ {format_body_item(item.inner)}"
    raise TypeError(f"not a body item: {item!r}")


def format_clause(c: Clause) -> str:
    body = ", ".join(format_body_item(b) for b in c.body)
    if c.kind is ClauseKind.QUERY:
        return f"?- {body}."
    head = format_body_item(c.head)
    if c.kind is ClauseKind.FACT:
        return f"{head}."
    return f"{head} :- {body}."


def print_program(db: Database) -> str:
    return "".join(format_clause(c) + "\n" for c in db.clauses)


# -- traversal helpers shared by later passes --------------------------------

def subterms(t: Term) -> Iterator[Term]:
    """Pre-order walk over ``t`` and everything below it."""
    yield t
    if isinstance(t, Compound):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, ListTerm):
        for e in t.elements:
            yield from subterms(e)
        if t.tail is not None:
            yield from subterms(t.tail)
    elif isinstance(t, ArithExpr):
        for o in t.operands:
            yield from subterms(o)


def item_terms(item: BodyItem) -> Iterator[Term]:
    """Top-level argument terms of a body item, left to right."""
    if isinstance(item, Call):
        yield from item.args
    elif isinstance(item, Negation):
        yield from item_terms(item.inner)
    else:
        yield item.lhs
        yield item.rhs


def clause_terms(c: Clause) -> Iterator[Term]:
    if c.head is not None:
        yield from c.head.args
    for item in c.body:
        yield from item_terms(item)


def clause_variables(c: Clause) -> list:
    """Variable names of ``c`` in order of first occurrence."""
    seen = {}
    for t in clause_terms(c):
        for s in subterms(t):
            if isinstance(s, Var):
                seen.setdefault(s.name, None)
    return list(seen)
