# Lists and side conditions.
#
# A Prolog list is an element of U wrapped by aList. Wherever the translation
# needs the raw list behind a variable, it adds a tester such as
# ((_ is aList) L1) to the clause antecedent.

from clp2chc import emit, parse_program, translate_program
from clp2chc.checks import check_horn_shape, check_sorts

program = """
list_concat([], L, L).
list_concat([H|T], L2, [H|L3]) :- list_concat(T, L2, L3).
"""

script = translate_program(parse_program(program))
check_sorts(script)
check_horn_shape(script)
print(emit(script))

# Without the peephole pass every rule fires literally; useful when debugging
# the translation itself.
print(emit(translate_program(parse_program(program), peephole=False)))
