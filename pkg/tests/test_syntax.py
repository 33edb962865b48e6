import pytest

from clp2chc.syntax import (
    ArithConstraint, ArithExpr, Atom, Call, ClauseKind, Compound, IntLit, LexError,
    ListTerm, Negation, PrologSyntaxError, TermDiseq, Unify, UnsupportedConstruct, Var,
    format_term, parse_program, parse_term, print_program, tokenize,
)

from conftest import read


def kinds(text):
    return [(t.kind, t.value) for t in tokenize(text)]


def test_tokenize_fact():
    assert kinds("man(tom).") == [("atom", "man"), ("punct", "("), ("atom", "tom"),
                                  ("punct", ")"), ("end", ".")]


def test_tokenize_constraint():
    assert kinds("X #= P + Q") == [("var", "X"), ("op", "#="), ("var", "P"), ("op", "+"), ("var", "Q")]


def test_tokenize_skips_comments():
    assert kinds("% comment\nfoo.") == [("atom", "foo"), ("end", ".")]
    assert kinds("/* block\n comment */ foo.") == [("atom", "foo"), ("end", ".")]


def test_token_spans_point_into_text():
    text = "p(X) :-\n  q(X)."
    for tok in tokenize(text):
        assert text[tok.span.start:tok.span.end] == tok.value
    q = [t for t in tokenize(text) if t.value == "q"][0]
    assert (q.span.line, q.span.column) == (2, 3)


def test_lex_errors_carry_position():
    with pytest.raises(LexError) as e:
        tokenize("p('abc")
    assert e.value.span.line == 1
    with pytest.raises(LexError):
        tokenize("p(x) :- q(§).")


def test_path_base_fact():
    (c,) = parse_program("path(A, A, 0, [waypoint(A, 0)]).").clauses
    assert c.kind is ClauseKind.FACT
    assert (c.head.predicate, c.head.arity) == ("path", 4)
    assert c.head.args[3] == ListTerm((Compound("waypoint", (Var("A"), IntLit(0))),), None)


def test_cities_query():
    (q,) = parse_program("?- path(tehran, munich, D, X), D #< 40.").clauses
    assert q.kind is ClauseKind.QUERY and q.head is None
    call, cons = q.body
    assert isinstance(call, Call) and (call.predicate, call.arity) == ("path", 4)
    assert cons == ArithConstraint("#<", Var("D"), IntLit(40))


def test_list_concat_rule():
    (c,) = parse_program("list_concat([X1|L1],L2,[X1|L3]) :- list_concat(L1,L2,L3).").clauses
    assert c.kind is ClauseKind.RULE
    assert c.head.args[0] == ListTerm((Var("X1"),), Var("L1"))


def test_operator_precedence_and_associativity():
    assert parse_term("1 + 2 * 3") == ArithExpr("+", (IntLit(1), ArithExpr("*", (IntLit(2), IntLit(3)))))
    assert parse_term("1 - 2 - 3") == ArithExpr("-", (ArithExpr("-", (IntLit(1), IntLit(2))), IntLit(3)))
    assert parse_term("X mod 2 * Y") == ArithExpr("*", (ArithExpr("mod", (Var("X"), IntLit(2))), Var("Y")))
    assert parse_term("-3") == ArithExpr("-", (IntLit(3),))
    assert parse_term("- X * 2") == ArithExpr("*", (ArithExpr("-", (Var("X"),)), IntLit(2)))


def test_body_items():
    (c,) = parse_program("p(X, Y) :- X = f(Y), X \\= Y, X =\\= a, \\+ X = Y, X #\\= 3, Y is X + 1, Y =:= 2.").clauses
    b = c.body
    assert isinstance(b[0], Unify)
    assert isinstance(b[1], TermDiseq) and isinstance(b[2], TermDiseq)
    assert b[3] == Negation(Unify(Var("X"), Var("Y")))
    assert b[4] == ArithConstraint("#\\=", Var("X"), IntLit(3))
    assert b[5] == ArithConstraint("#=", Var("Y"), ArithExpr("+", (Var("X"), IntLit(1))))
    assert b[6].op == "#="


def test_directive_is_dropped_with_warning():
    db = parse_program(read("cities.pl"))
    assert len(db.clauses) == 12
    assert [d.severity for d in db.diagnostics] == ["warning"]
    assert "directive" in db.diagnostics[0].format("cities.pl")
    assert db.diagnostics[0].format("cities.pl").startswith("cities.pl:1:1: warning:")


def test_anonymous_variables_are_distinct():
    (c,) = parse_program("p(_, _) :- q(_, X, _).").clauses
    names = [a.name for a in c.head.args] + [a.name for a in c.body[0].args if a.name != "X"]
    assert len(set(names)) == 4
    assert all(Var(n).anonymous for n in names)


def test_quoted_atoms_keep_their_name():
    (c,) = parse_program("p('hello world', 'It''s', 'a\\nb').").clauses
    assert c.head.args == (Atom("hello world"), Atom("It's"), Atom("a\nb"))


@pytest.mark.parametrize("text", ["a :- !.", "a :- write(x).", "a :- findall(X, b(X), L).", "a :- b ; c."])
def test_unsupported_constructs(text):
    with pytest.raises(UnsupportedConstruct):
        parse_program(text)


def test_user_predicate_may_shadow_builtin_name():
    db = parse_program("write(x).\na :- write(x).")
    assert len(db.clauses) == 2


def test_parse_error_reports_expected_tokens():
    with pytest.raises(PrologSyntaxError) as e:
        parse_program("p(X) :- X = .")
    assert e.value.span.column == 13
    assert "term" in e.value.expected


def test_print_program_examples():
    assert print_program(parse_program("man(tom).")).strip() == "man(tom)."
    q = "?- path(tehran, munich, D, X), D #< 40."
    assert print_program(parse_program(q)).strip() == q
    assert format_term(ListTerm(())) == "[]"


@pytest.mark.parametrize("name", ["cities.pl", "claire.pl", "list_concat.pl"])
def test_round_trip_of_data_files(name):
    db = parse_program(read(name))
    assert parse_program(print_program(db)) == db


def test_round_trip_of_tricky_terms():
    text = "p(-3, - X, 2 - -1, X mod 2, -(1 + 2), 1 - (2 - 3), 'A b', [a, b|T], [[]], 'mod', (-1) * 2).\n"
    db = parse_program(text)
    assert parse_program(print_program(db)) == db


def test_sibling_clause_spans_do_not_overlap():
    db = parse_program(read("cities.pl"))
    spans = [c.span for c in db.clauses]
    for a, b in zip(spans, spans[1:]):
        assert a.end <= b.start
