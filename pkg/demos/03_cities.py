# End to end on a small route-finding program.
#
# The query asks for a path from tehran to munich shorter than 40. A CHC
# solver answers unsat when the query is derivable, so unsat means "a route
# exists". Tightening the bound to 34 makes the script satisfiable.

import shutil
from pathlib import Path

from clp2chc import Bounds, emit, parse_program, program_holds, translate_program
from clp2chc.solver import SolverError, run_solver
from clp2chc.syntax import format_term

source = (Path(__file__).parent.parent / "tests" / "data" / "cities.pl").read_text()

for limit in (40, 34):
    db = parse_program(source.replace("D #< 40", f"D #< {limit}"))
    script = emit(translate_program(db))

    answer = program_holds(db, Bounds(term_depth=3, int_range=(0, 40), max_list_len=6))
    print(f"D < {limit}: oracle says {answer.status}")
    if answer.derivable:
        for name, value in answer.witness.items():
            print(f"    {name} = {format_term(value)}")

    z3 = shutil.which("z3")
    if z3 is None:
        print("    (z3 not found, skipping the solver)")
        continue
    try:
        print(f"    z3 says {run_solver(script, z3, timeout=60).status}")
    except SolverError as exc:
        print(f"    solver failed: {exc}")
