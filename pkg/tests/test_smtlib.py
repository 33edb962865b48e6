import pytest
from hypothesis import given, settings, strategies as st

from clp2chc.smtlib import (
    Apply, Assert, CheckSat, Constructor, DeclareDatatypes, Forall,
    IndexedTester, IntConst, Script, ScriptError, SetLogic, SmtParseError, Symbol,
    emit, parse_script, read_sexprs, render, structurally_equal,
)
from clp2chc.syntax import parse_program
from clp2chc.translator import translate_program

from conftest import read
from strategies import scripts

DUMMY = DeclareDatatypes((("U", (Constructor("u$default"),)),))


def script(*cmds):
    return Script((SetLogic("HORN"),) + cmds + (CheckSat(),))


def p(*args):
    return Apply(Symbol("p"), tuple(args))


def test_minimal_script():
    text = emit(script(DUMMY))
    assert [line for line in text.splitlines() if line.startswith("(")] == [
        "(set-logic HORN)", "(declare-datatype U (", "(check-sat)"]
    assert parse_script(text) == script(DUMMY)


def test_script_invariants():
    with pytest.raises(ScriptError):
        Script((CheckSat(),))
    with pytest.raises(ScriptError):
        Script((SetLogic("HORN"), Assert(Symbol("true")), DUMMY, CheckSat()))
    with pytest.raises(ScriptError):
        Script((SetLogic("HORN"), CheckSat(), CheckSat()))


def test_term_invariants():
    with pytest.raises(ValueError):
        Apply(Symbol("f"), ())
    with pytest.raises(ValueError):
        Forall((("X", "U"), ("X", "U")), Symbol("true"))
    with pytest.raises(ValueError):
        IntConst(-1)


def test_render():
    t = Forall((("X", "U"),), Apply(Symbol("=>"), (IndexedTester("anInt", Symbol("X")), p(Symbol("X")))))
    assert render(t) == "(forall ((X U)) (=> ((_ is anInt) X) (p X)))"


def test_parse_requires_set_logic():
    with pytest.raises(SmtParseError):
        parse_script("(check-sat)")


def test_parse_rejects_unknown_commands_and_bad_sexprs():
    with pytest.raises(SmtParseError):
        parse_script("(set-logic HORN) (frobnicate) (check-sat)")
    with pytest.raises(SmtParseError) as e:
        read_sexprs("(set-logic HORN")
    assert "1:" in str(e.value)
    with pytest.raises(SmtParseError):
        read_sexprs("(a))")


def test_cities_round_trip_both_styles():
    s = translate_program(parse_program(read("cities.pl")))
    for style in ("modern", "legacy"):
        assert parse_script(emit(s, style)) == s
    assert parse_script(emit(s, "legacy")) == parse_script(emit(s, "modern"))


def test_golden_file_round_trip():
    s = parse_script(read("cities.smt2"))
    assert parse_script(emit(s)) == s


def test_legacy_style_text():
    s = translate_program(parse_program(read("cities.pl")))
    text = emit(s, "legacy")
    assert "(declare-datatypes () (" in text
    assert "(waypoint (waypoint_1 U) (waypoint_2 U))" in text


def test_structural_equality_alpha_renaming():
    a = script(DUMMY, Assert(Forall((("X", "U"),), p(Symbol("X")))))
    b = script(DUMMY, Assert(Forall((("Y", "U"),), p(Symbol("Y")))))
    assert structurally_equal(a, b)


def test_structural_equality_detects_literal_change():
    a = script(DUMMY, Assert(p(IntConst(1))))
    b = script(DUMMY, Assert(p(IntConst(2))))
    assert not structurally_equal(a, b)


def test_structural_equality_flattens_and():
    x = Symbol("x")
    nested = Apply(Symbol("and"), (Apply(Symbol("and"), (p(x), p(x))), p(IntConst(1))))
    flat = Apply(Symbol("and"), (p(x), p(x), p(IntConst(1))))
    single = Apply(Symbol("and"), (p(x),))
    assert structurally_equal(script(DUMMY, Assert(nested)), script(DUMMY, Assert(flat)))
    assert structurally_equal(script(DUMMY, Assert(single)), script(DUMMY, Assert(p(x))))


def test_structural_equality_respects_command_order():
    a = script(DUMMY, Assert(p(IntConst(1))), Assert(p(IntConst(2))))
    b = script(DUMMY, Assert(p(IntConst(2))), Assert(p(IntConst(1))))
    assert not structurally_equal(a, b)


def test_structural_equality_distinguishes_free_symbols():
    a = script(DUMMY, Assert(Forall((("X", "U"),), p(Symbol("X"), Symbol("a")))))
    b = script(DUMMY, Assert(Forall((("X", "U"),), p(Symbol("a"), Symbol("X")))))
    assert not structurally_equal(a, b)


def test_quoted_symbols_survive():
    s = translate_program(parse_program("p('hello world', 'a|b')."))
    text = emit(s)
    assert "|hello world|" in text and " a$7Cb" in text
    assert parse_script(text) == s


# -- generated scripts -------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(scripts(), st.sampled_from(["modern", "legacy"]))
def test_emit_parse_inverse(s, style):
    text = emit(s, style)
    assert parse_script(text) == s


@settings(max_examples=200, deadline=None)
@given(scripts(), scripts(), scripts())
def test_structural_equality_is_an_equivalence(a, b, c):
    assert structurally_equal(a, a)
    assert structurally_equal(a, b) == structurally_equal(b, a)
    if structurally_equal(a, b) and structurally_equal(b, c):
        assert structurally_equal(a, c)
    assert structurally_equal(a, parse_script(emit(a, "legacy")))


@settings(max_examples=200, deadline=None)
@given(scripts())
def test_emitted_lines_stay_short(s):
    for line in emit(s).splitlines():
        assert len(line) <= 120 or "|" in line or len(line.split()) == 1
