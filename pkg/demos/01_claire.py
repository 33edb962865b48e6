# Smallest possible translation: one ground fact.
#
# Every atom and function symbol of the program becomes a constructor of a
# single datatype U. Predicates become Boolean functions over U.

from clp2chc import emit, parse_program, translate_program

program = "man(father(claire))."

db = parse_program(program)
script = translate_program(db)
print(emit(script))

# The same script, with the older datatype syntax some solvers still want.
print(emit(script, style="legacy"))
