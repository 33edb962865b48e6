"""One-shot bridge to an external CHC solver.

Any executable that accepts an ``.smt2`` path and prints ``sat``,
``unsat`` or ``unknown`` as its first answer line is supported.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Optional, Sequence

ANSWERS = ("sat", "unsat", "unknown")


class SolverError(RuntimeError):
    pass


class SolverTimeout(SolverError):
    pass


@dataclass(frozen=True)
class SolverResult:
    status: str       # sat / unsat / unknown
    output: str
    seconds: float


def find_solver(path: Optional[str] = None) -> Optional[str]:
    """Resolve an explicit path, ``$CLP2CHC_SOLVER`` or ``z3`` on ``PATH``."""
    candidate = path or os.environ.get("CLP2CHC_SOLVER")
    if candidate:
        return shutil.which(candidate) or (candidate if os.path.isfile(candidate) else None)
    return shutil.which("z3")


def parse_answer(output: str) -> str:
    for line in output.splitlines():
        word = line.strip()
        if word in ANSWERS:
            return word
        if word:
            break
    raise SolverError(f"solver printed no sat/unsat/unknown answer: {output.strip()[:200]!r}")


def run_solver(script_text: str, executable: str, args: Sequence[str] = (),
               timeout: float = 60.0) -> SolverResult:
    with tempfile.TemporaryDirectory(prefix="clp2chc-") as tmp:
        path = os.path.join(tmp, "input.smt2")
        with open(path, "w") as fh:
            fh.write(script_text)
        start = time.perf_counter()
        try:
            proc = subprocess.run([executable, *args, path], capture_output=True,
                                  text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            raise SolverTimeout(f"solver did not answer within {timeout:g} s") from None
        except OSError as exc:
            raise SolverError(f"cannot run solver {executable}: {exc.strerror or exc}") from None
        elapsed = time.perf_counter() - start
    out = proc.stdout
    try:
        status = parse_answer(out)
    except SolverError:
        detail = (proc.stderr or out).strip()[:200]
        raise SolverError(f"solver exited with code {proc.returncode}: {detail}") from None
    return SolverResult(status, out, elapsed)
