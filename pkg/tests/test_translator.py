import pytest

from clp2chc.checks import HornShapeError, SortError, check_horn_shape, check_sorts
from clp2chc.signatures import build_name_table, collect_functions, collect_predicates, detect_features
from clp2chc.smtlib import (
    Apply, Assert, CheckSat, DeclareDatatypes, Forall, IndexedTester, SetLogic,
    Symbol, emit, emit_command, parse_script, render, structurally_equal,
)
from clp2chc.syntax import clause_variables, parse_program, parse_term
from clp2chc.translator import (
    IsInt, IsList, NegatedPredicate, TranslationError, build_declarations,
    occurs_check_notes, translate_body_item, translate_clause, translate_program,
    translate_term,
)

from conftest import read


def table_for(text):
    return build_name_table(parse_program(text))


def term(text, program=None, **kw):
    t = parse_term(text)
    table = table_for(program or f"dummy({text}).")
    r = translate_term(t, table, **kw)
    return render(r.translated), [render(c.to_smt()) for c in r.conditions]


def item(program, **kw):
    db = parse_program(program)
    table = build_name_table(db)
    (b,) = db.clauses[0].body
    r = translate_body_item(b, table, **kw)
    return render(r.translated), [render(c.to_smt()) for c in r.conditions]


def clause(text, **kw):
    db = parse_program(text)
    return f"(assert {render(translate_clause(db.clauses[0], build_name_table(db), **kw).term)})"


# -- terms -------------------------------------------------------------------

def test_compound():
    assert term("father(claire)") == ("(father claire)", [])


def test_partial_list():
    assert term("[X1|L1]") == ("(aList (cons X1 (theList L1)))", ["((_ is aList) L1)"])


def test_arithmetic():
    assert term("P + Q") == ("(anInt (+ (theInt P) (theInt Q)))", ["((_ is anInt) P)", "((_ is anInt) Q)"])


def test_empty_and_closed_lists():
    assert term("[]") == ("(aList nil)", [])
    assert term("[a, b]") == ("(aList (cons a (cons b nil)))", [])
    assert term("[a, b|T]") == ("(aList (cons a (cons b (theList T))))", ["((_ is aList) T)"])


def test_integer_literals():
    assert term("7") == ("(anInt 7)", [])
    assert term("-7") == ("(anInt (- 7))", [])
    assert term("X / 2", peephole=False) == (
        "(anInt (div (theInt X) (theInt (anInt 2))))", ["((_ is anInt) X)", "((_ is anInt) (anInt 2))"])
    assert term("X mod 2") == ("(anInt (mod (theInt X) 2))", ["((_ is anInt) X)"])


def test_conditions_are_the_union_of_children():
    # side conditions of f(s, t) are exactly those of s and t, in order
    _, outer = term("f([H|T], X + Y)")
    _, left = term("[H|T]")
    _, right = term("X + Y")
    assert outer == left + right


def test_conditions_are_duplicate_free():
    _, conds = term("f(X + X, [A|T], [B|T])")
    assert conds == ["((_ is anInt) X)", "((_ is aList) T)"]


# -- body items --------------------------------------------------------------

def test_call():
    assert item("f(X, Y) :- likes(X, Y).") == ("(likes X Y)", [])


def test_comparison_mechanical_and_unwrapped():
    assert item("p(D) :- D #< 40.", peephole=False) == (
        "(< (theInt D) (theInt (anInt 40)))", ["((_ is anInt) D)", "((_ is anInt) (anInt 40))"])
    assert item("p(D) :- D #< 40.") == ("(< (theInt D) 40)", ["((_ is anInt) D)"])


@pytest.mark.parametrize("op, smt", [("#>", ">"), ("#>=", ">="), ("#<", "<"), ("#=<", "<=")])
def test_comparison_operators(op, smt):
    assert item(f"p(X, Y) :- X {op} Y.") == (f"({smt} (theInt X) (theInt Y))",
                                             ["((_ is anInt) X)", "((_ is anInt) Y)"])


def test_equality_and_disequalities():
    assert item("p(X, Y) :- X = Y.") == ("(= X Y)", [])
    assert item("p(X, Y) :- X =\\= Y.") == ("(not (= X Y))", [])
    assert item("p(X, Y) :- X \\= Y.") == ("(not (= X Y))", [])
    assert item("p(X, Y) :- X #\\= Y.") == ("(not (= (theInt X) (theInt Y)))",
                                           ["((_ is anInt) X)", "((_ is anInt) Y)"])


def test_negation_of_equation():
    assert item("p(X, Y) :- \\+ X = f(Y).") == ("(not (= X (f Y)))", [])


def test_clpz_equality_peephole():
    # a positive #= with one integer-wrapped side stays an equation over U
    assert item("p(D, P, Q) :- D #= P + Q.") == (
        "(= D (anInt (+ (theInt P) (theInt Q))))", ["((_ is anInt) P)", "((_ is anInt) Q)"])
    assert item("p(D, P, Q) :- D #= P + Q.", peephole=False) == (
        "(= (theInt D) (theInt (anInt (+ (theInt P) (theInt Q)))))",
        ["((_ is anInt) P)", "((_ is anInt) Q)", "((_ is anInt) D)",
         "((_ is anInt) (anInt (+ (theInt P) (theInt Q))))"])
    # under negation the typing of D must still be assumed
    assert item("p(D) :- \\+ D #= 3.") == ("(not (= (theInt D) 3))", ["((_ is anInt) D)"])


def test_negated_predicate_is_rejected():
    with pytest.raises(NegatedPredicate):
        item("q(X) :- \\+ p(X).")
    with pytest.raises(NegatedPredicate):
        translate_program(parse_program("q(X) :- \\+ \\+ p(X)."))


def test_negated_predicate_error_has_span():
    db = parse_program("a.\nq(X) :- \\+ p(X).")
    with pytest.raises(TranslationError) as e:
        translate_program(db)
    assert e.value.span.line == 2


# -- clauses -----------------------------------------------------------------

def test_ground_fact():
    assert clause("man(father(claire)).") == "(assert (man (father claire)))"


def test_rule():
    assert clause("friends(X,Y) :- likes(X,Y), likes(Y,X).") == (
        "(assert (forall ((X U) (Y U)) (=> (and (likes X Y) (likes Y X)) (friends X Y))))")


def test_quantified_fact():
    assert clause("list_concat([],L,L).") == "(assert (forall ((L$v U)) (list_concat (aList nil) L$v L$v)))"


def test_fact_with_conditions():
    assert clause("p([H|T]).") == "(assert (forall ((H U) (T U)) (=> ((_ is aList) T) (p (aList (cons H (theList T)))))))"


def test_query():
    assert clause("?- p(X), X #> 1.") == (
        "(assert (forall ((X U)) (=> (and (p X) (> (theInt X) 1) ((_ is anInt) X)) false)))")
    assert clause("?- p.") == "(assert (=> p false))"


def test_clause_quantifies_exactly_its_variables():
    db = parse_program(read("cities.pl"))
    table = build_name_table(db)
    for c in db.clauses:
        a = translate_clause(c, table)
        bound = [n for n, _ in a.term.bindings] if isinstance(a.term, Forall) else []
        assert len(bound) == len(set(bound))
        names = {table.variable(v) for v in clause_variables(c)}
        assert set(bound) == names


# -- declarations and programs ----------------------------------------------

def test_claire_declarations():
    db = parse_program("man(father(claire)).")
    table = build_name_table(db)
    cmds = build_declarations(collect_functions(db), collect_predicates(db), detect_features(db), table)
    text = emit_commands(cmds)
    assert "(declare-datatype U (" in text
    assert "(claire)" in text and "(father (father_1 U))" in text
    assert "(declare-fun man (U) Bool)" in text


def emit_commands(cmds):
    return "\n".join(emit_command(c) for c in cmds)


def test_default_constructor_when_universe_has_no_base_case():
    s = translate_program(parse_program("p(X)."))
    (dt,) = [c for c in s.commands if isinstance(c, DeclareDatatypes)]
    assert [c.name for c in dt.sorts[0][1]] == ["u$default"]
    s = translate_program(parse_program("p(f(X))."))
    (dt,) = [c for c in s.commands if isinstance(c, DeclareDatatypes)]
    assert [c.name for c in dt.sorts[0][1]] == ["f", "u$default"]


def test_empty_program():
    s = translate_program(parse_program(""))
    assert isinstance(s.commands[0], SetLogic) and isinstance(s.commands[-1], CheckSat)
    assert len(s.commands) == 3


def test_constructor_order():
    s = translate_program(parse_program(read("cities.pl")))
    (dt,) = [c for c in s.commands if isinstance(c, DeclareDatatypes)]
    names = [c.name for c in dt.sorts[0][1]]
    assert names == ["anInt", "aList", "tehran", "vienna", "paris", "munich", "rome", "lausanne", "waypoint"]
    assert [c.name for c in dt.sorts[1][1]] == ["nil", "cons"]


def test_force_features():
    s = translate_program(parse_program("man(tom)."), force_features=True)
    (dt,) = [c for c in s.commands if isinstance(c, DeclareDatatypes)]
    assert [c.name for c in dt.sorts[0][1]][:2] == ["anInt", "aList"]
    check_sorts(s)


@pytest.mark.parametrize("pl, smt", [
    ("claire.pl", "claire.smt2"),
    ("list_concat.pl", "list_concat.smt2"),
    ("cities.pl", "cities.smt2"),
])
def test_golden_translations(pl, smt):
    ours = translate_program(parse_program(read(pl)))
    assert structurally_equal(ours, parse_script(read(smt)))
    assert structurally_equal(parse_script(emit(ours, "legacy")), parse_script(read(smt)))


def test_golden_rejects_changed_literal():
    ours = translate_program(parse_program(read("cities.pl").replace("31", "32")))
    assert not structurally_equal(ours, parse_script(read("cities.smt2")))


def test_translation_is_deterministic():
    text = read("cities.pl")
    assert emit(translate_program(parse_program(text))) == emit(translate_program(parse_program(text)))


@pytest.mark.parametrize("peephole", [True, False])
@pytest.mark.parametrize("name", ["cities.pl", "claire.pl", "list_concat.pl"])
def test_sorts_and_horn_shape(name, peephole):
    s = translate_program(parse_program(read(name)), peephole=peephole)
    check_sorts(s)
    check_horn_shape(s)


def test_sort_checker_catches_errors():
    good = translate_program(parse_program("p(X) :- X #> 1."))
    bad_assert = Assert(Apply(Symbol("p"), (Symbol("X"),)))
    with pytest.raises(SortError):
        check_sorts(type(good)(good.commands[:-1] + (bad_assert, CheckSat())))
    bad_int = Assert(Forall((("X", "U"),), Apply(Symbol(">"), (Symbol("X"), Symbol("X")))))
    with pytest.raises(SortError):
        check_sorts(type(good)(good.commands[:-1] + (bad_int, CheckSat())))


def test_horn_checker_catches_non_horn():
    good = translate_program(parse_program("p(a)."))
    p = Apply(Symbol("p"), (Symbol("a"),))
    bad = Assert(Apply(Symbol("not"), (p,)))
    with pytest.raises(HornShapeError):
        check_horn_shape(type(good)(good.commands[:-1] + (bad, CheckSat())))
    bad = Assert(Apply(Symbol("=>"), (Apply(Symbol("not"), (p,)), p)))
    with pytest.raises(HornShapeError):
        check_horn_shape(type(good)(good.commands[:-1] + (bad, CheckSat())))


def test_occurs_check_note():
    notes = occurs_check_notes(parse_program("?- X = father(X)."))
    assert len(notes) == 1 and notes[0].severity == "note"
    assert occurs_check_notes(parse_program("?- X = father(Y).")) == []
    s = translate_program(parse_program("?- X = father(X)."))
    assert "(= X (father X))" in emit(s)


def test_multiple_queries_each_get_an_assertion():
    s = translate_program(parse_program("p(a).\n?- p(a).\n?- p(b)."))
    asserts = [c for c in s.commands if isinstance(c, Assert)]
    assert len(asserts) == 3
    assert sum(1 for c in s.commands if isinstance(c, CheckSat)) == 1


def test_side_condition_types():
    assert IsInt(Symbol("X")).to_smt() == IndexedTester("anInt", Symbol("X"))
    assert IsList(Symbol("X")).to_smt() == IndexedTester("aList", Symbol("X"))
