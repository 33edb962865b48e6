# The bounded oracle on its own.
#
# It evaluates a program bottom-up over the ground terms that fit inside the
# bounds. A fixpoint that saturates with nothing cut off is a proof of
# non-derivability; otherwise a negative answer only holds within the bounds.

from clp2chc import Bounds, fixpoint, parse_program, query_holds
from clp2chc.syntax import format_term

peano = parse_program("""
nat(z).
nat(s(X)) :- nat(X).
even(z).
even(s(s(X))) :- even(X).
""")

facts = fixpoint(peano, Bounds(term_depth=4))
print(f"saturated={facts.saturated} exhaustive={facts.exhaustive} after {facts.iterations} rounds")
for args in facts.of("even", 1):
    print("  even", format_term(args[0]))

# s(s(s(z))) is odd, so the query fails. The answer is not exhaustive because
# the chain of naturals is cut off at the depth bound.
q = parse_program("?- even(s(s(s(z)))).")
answer = query_holds(peano, q.queries[0], Bounds(term_depth=4))
print(answer.status, "| exhaustive:", answer.exhaustive)

# Integers live in a finite window too; negative bounds work.
arith = parse_program("sq(X, Y) :- Y #= X * X.\n?- sq(X, 9), X #< 0.")
answer = query_holds(arith, arith.queries[0], Bounds(term_depth=1, int_range=(-5, 25)))
print(answer.status, {k: format_term(v) for k, v in answer.witness.items()})
