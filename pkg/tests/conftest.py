import os
import re
import shutil
from pathlib import Path

from clp2chc.oracle import Bounds

import pytest

DATA = Path(__file__).parent / "data"
CORPUS = Path(__file__).parent / "corpus"

# criterion number -> [description, outcomes]; filled from tests marked ``criterion``
ACCEPTANCE = {}


def solver_path():
    return os.environ.get("CLP2CHC_SOLVER") or shutil.which("z3")


@pytest.fixture
def solver():
    path = solver_path()
    if path is None:
        pytest.skip("no CHC solver on PATH (set CLP2CHC_SOLVER)")
    return path


def read(name):
    return (DATA / name).read_text()


def corpus_programs():
    return sorted(CORPUS.glob("*.pl"))


def corpus_header(path):
    """Bounds and expected oracle status from the ``% bounds:``/``% expect:`` lines."""
    text = path.read_text()
    b = re.search(r"^% bounds: depth=(\d+) int=(-?\d+):(-?\d+) list=(\d+)", text, re.M)
    e = re.search(r"^% expect: (.+)$", text, re.M)
    bounds = Bounds(int(b[1]), (int(b[2]), int(b[3])), int(b[4]))
    return bounds, e[1].strip()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, desc): acceptance criterion this test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not (rep.failed or rep.skipped)):
        return
    n, desc = mark.args
    entry = ACCEPTANCE.setdefault(n, [desc, []])
    entry[1].append("fail" if rep.failed else "skip" if rep.skipped else "pass")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        desc, outcomes = ACCEPTANCE[n]
        if "fail" in outcomes:
            status = "FAIL"
        elif "pass" in outcomes:
            status = "PASS" + (" (some checks skipped)" if "skip" in outcomes else "")
        else:
            status = "SKIP"
        terminalreporter.write_line(f"criterion {n}: {status}  {desc}")
