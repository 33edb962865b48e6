"""SMT-LIB script model, printer, reader and structural comparison.

Only the commands needed for Horn-clause scripts are modelled:
``set-logic``, ``declare-datatype(s)``, ``declare-fun``, ``assert`` and
``check-sat``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .signatures import is_simple_symbol


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class Symbol:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class IntConst:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("SMT-LIB numerals are non-negative; use (- n)")


@dataclass(frozen=True)
class Apply:
    head: "SmtTerm"
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("Apply needs at least one argument")


@dataclass(frozen=True)
class Forall:
    bindings: tuple  # ((name, sort), ...)
    body: "SmtTerm"

    def __post_init__(self):
        names = [n for n, _ in self.bindings]
        if not names or len(set(names)) != len(names):
            raise ValueError("forall binders must be non-empty and distinct")


@dataclass(frozen=True)
class IndexedTester:
    """``((_ is C) arg)``."""

    constructor: str
    arg: "SmtTerm"


SmtTerm = Union[Symbol, IntConst, Apply, Forall, IndexedTester]

TRUE = Symbol("true")
FALSE = Symbol("false")


def app(head: str, *args) -> SmtTerm:
    """``(head args...)``, or the bare symbol when there are no arguments."""
    return Apply(Symbol(head), tuple(args)) if args else Symbol(head)


# -- commands ----------------------------------------------------------------

@dataclass(frozen=True)
class Constructor:
    name: str
    selectors: tuple = ()  # ((selector, sort), ...)


@dataclass(frozen=True)
class SetLogic:
    logic: str


@dataclass(frozen=True)
class DeclareDatatypes:
    sorts: tuple  # ((sort name, (Constructor, ...)), ...)


@dataclass(frozen=True)
class DeclareFun:
    name: str
    arg_sorts: tuple
    result: str


@dataclass(frozen=True)
class Assert:
    term: SmtTerm


@dataclass(frozen=True)
class CheckSat:
    pass


Command = Union[SetLogic, DeclareDatatypes, DeclareFun, Assert, CheckSat]


class ScriptError(ValueError):
    pass


@dataclass(frozen=True)
class Script:
    commands: tuple

    def __post_init__(self):
        cmds = self.commands
        if not cmds or not isinstance(cmds[0], SetLogic):
            raise ScriptError("script must start with set-logic")
        if sum(isinstance(c, SetLogic) for c in cmds) != 1:
            raise ScriptError("script must contain exactly one set-logic")
        if not isinstance(cmds[-1], CheckSat) or sum(isinstance(c, CheckSat) for c in cmds) != 1:
            raise ScriptError("script must end with its only check-sat")
        seen_assert = False
        for c in cmds:
            if isinstance(c, Assert):
                seen_assert = True
            elif isinstance(c, (DeclareDatatypes, DeclareFun)) and seen_assert:
                raise ScriptError("declarations must precede assertions")

    @property
    def asserts(self) -> list:
        return [c.term for c in self.commands if isinstance(c, Assert)]


# -- printing ----------------------------------------------------------------

WIDTH = 100


def render(t: SmtTerm) -> str:
    """Single-line rendering of a term."""
    if isinstance(t, Symbol):
        return t.name
    if isinstance(t, IntConst):
        return str(t.value)
    if isinstance(t, Apply):
        return f"({render(t.head)} {' '.join(render(a) for a in t.args)})"
    if isinstance(t, Forall):
        return f"(forall {_bindings(t.bindings)} {render(t.body)})"
    if isinstance(t, IndexedTester):
        return f"((_ is {t.constructor}) {render(t.arg)})"
    raise TypeError(f"not an SMT term: {t!r}")


def _bindings(bindings) -> str:
    return "(" + " ".join(f"({n} {s})" for n, s in bindings) + ")"


def _pretty(t: SmtTerm, indent: int) -> list:
    flat = render(t)
    if indent + len(flat) <= WIDTH or isinstance(t, (Symbol, IntConst)):
        return [" " * indent + flat]
    pad = " " * indent
    if isinstance(t, Forall):
        lines = _wrap_bindings(t.bindings, indent)
        lines += _pretty(t.body, indent + 4)
        lines[-1] += ")"
        return lines
    if isinstance(t, IndexedTester):
        lines = [f"{pad}((_ is {t.constructor})"] + _pretty(t.arg, indent + 4)
        lines[-1] += ")"
        return lines
    lines = [f"{pad}({render(t.head)}"]
    for a in t.args:
        lines += _pretty(a, indent + 4)
    lines[-1] += ")"
    return lines


def _wrap_bindings(bindings, indent: int) -> list:
    pad = " " * indent
    parts = [f"({n} {s})" for n, s in bindings]
    lines, cur = [], f"{pad}(forall ("
    for i, p in enumerate(parts):
        piece = p if i == 0 or cur.endswith("(") else " " + p
        if len(cur) + len(piece) > WIDTH and not cur.endswith("("):
            lines.append(cur)
            cur = " " * (indent + 9) + p
        else:
            cur += piece
    lines.append(cur + ")")
    return lines


def _emit_constructor(c: Constructor, legacy: bool) -> str:
    if not c.selectors:
        return c.name if legacy else f"({c.name})"
    sels = " ".join(f"({n} {s})" for n, s in c.selectors)
    return f"({c.name} {sels})"


def _emit_datatypes(cmd: DeclareDatatypes, legacy: bool) -> str:
    out = []
    if legacy:
        out.append("(declare-datatypes () (")
        for name, ctors in cmd.sorts:
            out.append(f"    ({name}")
            out += [f"        {_emit_constructor(c, True)}" for c in ctors]
            out.append("    )")
        out.append("))")
    elif len(cmd.sorts) == 1:
        name, ctors = cmd.sorts[0]
        out.append(f"(declare-datatype {name} (")
        out += [f"    {_emit_constructor(c, False)}" for c in ctors]
        out.append("))")
    else:
        heads = " ".join(f"({name} 0)" for name, _ in cmd.sorts)
        out.append(f"(declare-datatypes ({heads}) (")
        for _, ctors in cmd.sorts:
            out.append("    (")
            out += [f"        {_emit_constructor(c, False)}" for c in ctors]
            out.append("    )")
        out.append("))")
    return "\n".join(out)


def emit_command(cmd: Command, style: str = "modern") -> str:
    if isinstance(cmd, SetLogic):
        return f"(set-logic {cmd.logic})"
    if isinstance(cmd, DeclareDatatypes):
        return _emit_datatypes(cmd, style == "legacy")
    if isinstance(cmd, DeclareFun):
        return f"(declare-fun {cmd.name} ({' '.join(cmd.arg_sorts)}) {cmd.result})"
    if isinstance(cmd, Assert):
        flat = f"(assert {render(cmd.term)})"
        if len(flat) <= WIDTH:
            return flat
        lines = ["(assert"] + _pretty(cmd.term, 4)
        lines[-1] += ")"
        return "\n".join(lines)
    if isinstance(cmd, CheckSat):
        return "(check-sat)"
    raise TypeError(f"not a command: {cmd!r}")


def emit(script: Script, style: str = "modern") -> str:
    """Print ``script`` as SMT-LIB text.

    ``style`` selects the datatype declaration syntax: ``"modern"`` uses
    ``declare-datatype`` / ``declare-datatypes ((U 0) ...)``, ``"legacy"``
    uses ``declare-datatypes () (...)``.
    """
    if style not in ("modern", "legacy"):
        raise ValueError(f"unknown style {style!r}")
    out = []
    prev = None
    for cmd in script.commands:
        if prev is not None and type(cmd) is not type(prev) and not isinstance(prev, SetLogic):
            out.append("")
        out.append(emit_command(cmd, style))
        prev = cmd
    return "\n".join(out) + "\n"


# -- reading -----------------------------------------------------------------

class SmtParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        super().__init__(f"{line}:{column}: {message}" if line else message)


_TOKEN = re.compile(r"""
    (?P<ws>\s+) | (?P<comment>;[^\n]*) | (?P<open>\() | (?P<close>\)) |
    (?P<quoted>\|[^|\\]*\|) | (?P<string>"(?:[^"]|"")*") |
    (?P<atom>[^\s()|";]+)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    column: int


def read_sexprs(text: str) -> list:
    """Read S-expressions into nested lists of :class:`_Tok` leaves."""
    stack, top = [], []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SmtParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, s = m.lastgroup, m.group()
        col = pos - line_start + 1
        if kind == "open":
            stack.append((top, line, col))
            top = []
        elif kind == "close":
            if not stack:
                raise SmtParseError("unbalanced ')'", line, col)
            parent, _, _ = stack.pop()
            parent.append(top)
            top = parent
        elif kind in ("quoted", "string", "atom"):
            top.append(_Tok(s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    if stack:
        _, l, c = stack[-1]
        raise SmtParseError("unclosed '('", l, c)
    return top


def _pos(x):
    while isinstance(x, list):
        if not x:
            return 0, 0
        x = x[0]
    return x.line, x.column


def _sym(x) -> str:
    if not isinstance(x, _Tok):
        raise SmtParseError("expected a symbol", *_pos(x))
    s = x.text
    if s.startswith("|") and is_simple_symbol(s[1:-1]):
        return s[1:-1]
    return s


def _term(x) -> SmtTerm:
    if isinstance(x, _Tok):
        if x.text.isdigit():
            return IntConst(int(x.text))
        return Symbol(_sym(x))
    if not x:
        raise SmtParseError("empty application", *_pos(x))
    head = x[0]
    if isinstance(head, _Tok) and head.text == "forall":
        if len(x) != 3 or not isinstance(x[1], list):
            raise SmtParseError("malformed forall", *_pos(x))
        binds = []
        for b in x[1]:
            if not isinstance(b, list) or len(b) != 2:
                raise SmtParseError("malformed binder", *_pos(b))
            binds.append((_sym(b[0]), _sym(b[1])))
        return Forall(tuple(binds), _term(x[2]))
    if (isinstance(head, list) and len(head) == 3 and isinstance(head[0], _Tok)
            and head[0].text == "_" and isinstance(head[1], _Tok) and head[1].text == "is"):
        if len(x) != 2:
            raise SmtParseError("tester takes one argument", *_pos(x))
        return IndexedTester(_sym(head[2]), _term(x[1]))
    if len(x) < 2:
        raise SmtParseError("application needs an argument", *_pos(x))
    return Apply(_term(head), tuple(_term(a) for a in x[1:]))


def _constructor(x) -> Constructor:
    if isinstance(x, _Tok):
        return Constructor(_sym(x))
    if not x:
        raise SmtParseError("empty constructor", *_pos(x))
    sels = []
    for s in x[1:]:
        if not isinstance(s, list) or len(s) != 2:
            raise SmtParseError("malformed selector", *_pos(s))
        sels.append((_sym(s[0]), _sym(s[1])))
    return Constructor(_sym(x[0]), tuple(sels))


def _datatypes(x) -> DeclareDatatypes:
    name = x[0].text
    if name == "declare-datatype":
        if len(x) != 3 or not isinstance(x[2], list):
            raise SmtParseError("malformed declare-datatype", *_pos(x))
        return DeclareDatatypes(((_sym(x[1]), tuple(_constructor(c) for c in x[2])),))
    if len(x) != 3 or not isinstance(x[1], list) or not isinstance(x[2], list):
        raise SmtParseError("malformed declare-datatypes", *_pos(x))
    heads, bodies = x[1], x[2]
    sorts = []
    if not heads:
        for body in bodies:
            if not isinstance(body, list) or not body:
                raise SmtParseError("malformed datatype", *_pos(body))
            sorts.append((_sym(body[0]), tuple(_constructor(c) for c in body[1:])))
    else:
        if len(heads) != len(bodies):
            raise SmtParseError("datatype names and bodies differ in number", *_pos(x))
        for h, body in zip(heads, bodies):
            if not isinstance(h, list) or len(h) != 2 or h[1].text != "0":
                raise SmtParseError("only arity-0 datatypes are supported", *_pos(h))
            if not isinstance(body, list):
                raise SmtParseError("malformed constructor list", *_pos(body))
            sorts.append((_sym(h[0]), tuple(_constructor(c) for c in body)))
    return DeclareDatatypes(tuple(sorts))


def _command(x) -> Command:
    if not isinstance(x, list) or not x or not isinstance(x[0], _Tok):
        raise SmtParseError("expected a command", *_pos(x))
    name = x[0].text
    if name == "set-logic" and len(x) == 2:
        return SetLogic(_sym(x[1]))
    if name in ("declare-datatype", "declare-datatypes"):
        return _datatypes(x)
    if name == "declare-fun" and len(x) == 4 and isinstance(x[2], list):
        return DeclareFun(_sym(x[1]), tuple(_sym(s) for s in x[2]), _sym(x[3]))
    if name == "assert" and len(x) == 2:
        return Assert(_term(x[1]))
    if name == "check-sat" and len(x) == 1:
        return CheckSat()
    if name in ("set-logic", "declare-fun", "assert", "check-sat"):
        raise SmtParseError(f"malformed {name}", x[0].line, x[0].column)
    raise SmtParseError(f"unknown command {name!r}", x[0].line, x[0].column)


def parse_script(text: str) -> Script:
    """Read SMT-LIB text produced by :func:`emit` (either style)."""
    commands = tuple(_command(x) for x in read_sexprs(text))
    try:
        return Script(commands)
    except ScriptError as exc:
        raise SmtParseError(str(exc)) from None


# -- structural comparison ---------------------------------------------------

def _flatten_and(args):
    for a in args:
        if isinstance(a, Apply) and a.head == Symbol("and"):
            yield from _flatten_and(a.args)
        else:
            yield a


def _first_occurrence(t, bound, order):
    if isinstance(t, Symbol):
        if t.name in bound and t.name not in order:
            order.append(t.name)
    elif isinstance(t, Apply):
        _first_occurrence(t.head, bound, order)
        for a in t.args:
            _first_occurrence(a, bound, order)
    elif isinstance(t, IndexedTester):
        _first_occurrence(t.arg, bound, order)
    elif isinstance(t, Forall):
        inner = bound - {n for n, _ in t.bindings}
        _first_occurrence(t.body, inner, order)


def normalize_term(t: SmtTerm, env=None, counter=None) -> SmtTerm:
    """Canonical form used by :func:`structurally_equal`.

    Nested ``and`` is flattened, one-element ``and`` is dropped, and forall
    binders are renamed ``?0, ?1, ...`` in order of first use in the body.
    Binder order itself is not significant.
    """
    env = {} if env is None else env
    counter = [0] if counter is None else counter
    if isinstance(t, Symbol):
        return Symbol(env.get(t.name, t.name))
    if isinstance(t, IntConst):
        return t
    if isinstance(t, IndexedTester):
        return IndexedTester(t.constructor, normalize_term(t.arg, env, counter))
    if isinstance(t, Apply):
        head = normalize_term(t.head, env, counter)
        args = tuple(normalize_term(a, env, counter) for a in t.args)
        if head == Symbol("and"):
            args = tuple(_flatten_and(args))
            if len(args) == 1:
                return args[0]
        return Apply(head, args)
    if isinstance(t, Forall):
        sorts = dict(t.bindings)
        order = []
        _first_occurrence(t.body, set(sorts), order)
        order += [n for n, _ in t.bindings if n not in order]
        inner = dict(env)
        binds = []
        for n in order:
            fresh = f"?{counter[0]}"
            counter[0] += 1
            inner[n] = fresh
            binds.append((fresh, sorts[n]))
        return Forall(tuple(binds), normalize_term(t.body, inner, counter))
    raise TypeError(f"not an SMT term: {t!r}")


def normalize_command(cmd: Command):
    if isinstance(cmd, Assert):
        return Assert(normalize_term(cmd.term))
    if isinstance(cmd, DeclareDatatypes):
        return ("datatypes", tuple((name, frozenset(ctors)) for name, ctors in cmd.sorts))
    return cmd


def structurally_equal(a: Script, b: Script) -> bool:
    """Equality up to binder renaming, datatype syntax and ``and`` nesting.

    Command order matters.  Within one datatype the constructor order does
    not, since it carries no meaning for the solver.
    """
    if len(a.commands) != len(b.commands):
        return False
    return all(normalize_command(x) == normalize_command(y) for x, y in zip(a.commands, b.commands))
