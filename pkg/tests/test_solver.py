import pytest

from clp2chc.solver import SolverError, SolverTimeout, find_solver, parse_answer, run_solver

from fakes import answering, fake_solver


@pytest.mark.parametrize("out, status", [
    ("sat\n", "sat"), ("unsat\n", "unsat"), ("\n  unknown  \n(model)\n", "unknown"),
    ("unsat\n(error \"x\")\n", "unsat"),
])
def test_parse_answer(out, status):
    assert parse_answer(out) == status


@pytest.mark.parametrize("out", ["", "(error \"line 1\")\nsat\n", "satisfiable\n"])
def test_parse_answer_rejects_garbage(out):
    with pytest.raises(SolverError):
        parse_answer(out)


def test_run_solver_passes_script_path_last(tmp_path):
    exe = fake_solver(tmp_path, """
        args = sys.argv[1:]
        text = open(args[-1]).read()
        print("unsat" if args[:-1] == ["-v:0"] and "(check-sat)" in text else "sat")
    """)
    result = run_solver("(set-logic HORN)\n(check-sat)\n", exe, ["-v:0"])
    assert result.status == "unsat" and result.seconds >= 0


def test_run_solver_timeout(tmp_path):
    exe = fake_solver(tmp_path, "time.sleep(30)\n")
    with pytest.raises(SolverTimeout):
        run_solver("", exe, timeout=0.5)


def test_run_solver_launch_failure(tmp_path):
    with pytest.raises(SolverError) as e:
        run_solver("", str(tmp_path / "missing"))
    assert not isinstance(e.value, SolverTimeout)


def test_run_solver_reports_crash(tmp_path):
    exe = fake_solver(tmp_path, "sys.stderr.write('boom'); sys.exit(4)\n")
    with pytest.raises(SolverError, match="code 4: boom"):
        run_solver("", exe)


def test_find_solver(tmp_path, monkeypatch):
    exe = answering(tmp_path, "sat")
    assert find_solver(exe) == exe
    monkeypatch.setenv("CLP2CHC_SOLVER", exe)
    assert find_solver() == exe
    assert find_solver(str(tmp_path / "nope")) is None
