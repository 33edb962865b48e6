"""Command-line driver: translate a Prolog file and optionally check it.

Modes:

* ``translate`` (default) writes the SMT-LIB script to ``-o`` or stdout.
* ``solve`` hands the script to an external CHC solver and prints its answer.
* ``oracle`` runs the bounded bottom-up evaluator on the program itself.
* ``diff`` runs both and compares: a derivable query must make the script
  ``unsat``, and a saturated, exhaustive non-derivation must make it ``sat``.

Exit codes: 0 success (including ``agree`` and ``unknown`` in diff mode),
1 usage, parse or translation error, 2 solver launch failure, timeout or
``unknown`` answer in solve mode, 3 diff disagreement.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from . import __version__
from .oracle import Bounds, QueryAnswer, UniverseTooLarge, program_holds
from .smtlib import emit
from .solver import SolverError, SolverTimeout, find_solver, run_solver
from .syntax import Diagnostic, PrologSyntaxError, format_term, parse_program
from .translator import TranslationError, occurs_check_notes, translate_program

MODES = ("translate", "oracle", "solve", "diff")
EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_DISAGREE = 0, 1, 2, 3


@dataclass
class RunConfig:
    input: str
    output: Optional[str] = None
    style: str = "modern"
    peephole: bool = True
    force_features: bool = False
    mode: str = "translate"
    bounds: Optional[Bounds] = field(default_factory=Bounds)
    solver: Optional[str] = None
    solver_args: tuple = ()
    timeout: float = 60.0
    dump_ast: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.style not in ("modern", "legacy"):
            raise ValueError(f"unknown style {self.style!r}")
        if self.mode in ("solve", "diff") and not self.solver:
            raise ValueError(f"mode {self.mode} needs a solver executable")
        if self.mode in ("oracle", "diff") and self.bounds is None:
            raise ValueError(f"mode {self.mode} needs oracle bounds")


@dataclass
class RunReport:
    status: str
    diagnostics: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK
    script: Optional[str] = None
    answer: Optional[QueryAnswer] = None
    solver_status: Optional[str] = None


def diff_verdict(answer: Optional[QueryAnswer], solver_status: Optional[str]) -> str:
    """Compare an oracle answer with a solver status.

    ``None`` for either side means it produced no usable answer.
    """
    if answer is None or solver_status not in ("sat", "unsat"):
        return "unknown"
    if answer.derivable:
        return "agree" if solver_status == "unsat" else "disagree"
    if not answer.saturated:
        return "unknown"
    if solver_status == "sat":
        return "agree"
    # a bounded non-derivation only refutes unsat when nothing was cut off
    return "disagree" if answer.exhaustive else "unknown"


def _oracle_status(answer: QueryAnswer) -> str:
    if answer.derivable:
        return "unsat"
    return "sat" if answer.saturated else "unknown"


def _describe_answer(answer: QueryAnswer) -> str:
    if answer.derivable:
        lines = ["derivable"]
        lines += [f"  {v} = {format_term(t)}" for v, t in answer.witness.items()]
        return "\n".join(lines)
    if not answer.saturated:
        return "unknown at these bounds (no fixpoint within max iterations)"
    if not answer.exhaustive:
        return "not derivable within bounds (some instances exceeded them)"
    return "not derivable"


@contextmanager
def _timed(timings: dict, phase: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[phase] = time.perf_counter() - start


def run(cfg: RunConfig, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> RunReport:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    report = RunReport("error")
    name = cfg.input

    def finish(status: str, code: int) -> RunReport:
        report.status, report.exit_code = status, code
        for d in report.diagnostics:
            print(d.format(name), file=stderr)
        return report

    try:
        with open(cfg.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        report.diagnostics.append(Diagnostic("error", f"cannot read input: {exc.strerror or exc}", None))
        return finish("error", EXIT_INPUT)

    try:
        with _timed(report.timings, "parse"):
            db = parse_program(text)
    except PrologSyntaxError as exc:
        report.diagnostics.append(Diagnostic("error", exc.message, exc.span))
        return finish("error", EXIT_INPUT)
    report.diagnostics += list(db.diagnostics)
    if cfg.dump_ast:
        for c in db.clauses:
            print(repr(c), file=stderr)

    try:
        with _timed(report.timings, "translate"):
            script = translate_program(db, peephole=cfg.peephole, force_features=cfg.force_features)
            report.script = emit(script, style=cfg.style)
    except TranslationError as exc:
        report.diagnostics.append(Diagnostic("error", exc.message, exc.span))
        return finish("error", EXIT_INPUT)
    report.diagnostics += occurs_check_notes(db)

    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(report.script)
    elif cfg.mode == "translate":
        stdout.write(report.script)
    if cfg.mode == "translate":
        return finish("translated", EXIT_OK)

    if cfg.mode in ("oracle", "diff"):
        try:
            with _timed(report.timings, "oracle"):
                report.answer = program_holds(db, cfg.bounds)
        except UniverseTooLarge as exc:
            report.diagnostics.append(Diagnostic("warning", f"oracle skipped: {exc}", None))
        if report.answer is not None:
            print(f"oracle: {_describe_answer(report.answer)}", file=stdout)
        if cfg.mode == "oracle":
            status = _oracle_status(report.answer) if report.answer else "unknown"
            return finish(status, EXIT_OK)

    try:
        with _timed(report.timings, "solve"):
            result = run_solver(report.script, cfg.solver, cfg.solver_args, cfg.timeout)
        report.solver_status = result.status
    except SolverTimeout as exc:
        report.diagnostics.append(Diagnostic("error", str(exc), None))
        return finish("unknown", EXIT_SOLVER)
    except SolverError as exc:
        report.diagnostics.append(Diagnostic("error", str(exc), None))
        return finish("unknown" if cfg.mode == "diff" else "error", EXIT_SOLVER)

    if cfg.mode == "solve":
        print(result.status, file=stdout)
        return finish(result.status, EXIT_OK if result.status != "unknown" else EXIT_SOLVER)

    verdict = diff_verdict(report.answer, result.status)
    print(f"solver: {result.status}", file=stdout)
    print(verdict, file=stdout)
    return finish(verdict, EXIT_DISAGREE if verdict == "disagree" else EXIT_OK)


def _int_range(text: str) -> tuple:
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="clp2chc",
        description="Translate Prolog/CLP(Z) programs to SMT-LIB constrained Horn clauses.",
        epilog="With several queries the script is unsat iff at least one query is derivable.",
    )
    p.add_argument("input", help="Prolog source file")
    p.add_argument("-o", "--output", help="write the .smt2 script here (default: stdout in translate mode)")
    p.add_argument("--style", choices=("modern", "legacy"), default="modern",
                   help="datatype declaration syntax")
    p.add_argument("--no-peephole", dest="peephole", action="store_false",
                   help="emit the rule-by-rule translation without simplification")
    p.add_argument("--force-features", action="store_true",
                   help="always declare the integer and list wrappers")
    p.add_argument("--mode", choices=MODES, default="translate")
    g = p.add_argument_group("oracle bounds")
    g.add_argument("--depth", type=int, default=3, help="maximum term depth (default 3)")
    g.add_argument("--int-range", type=_int_range, default=(0, 20), metavar="LO:HI",
                   help="integer range (default 0:20; write --int-range=-5:5 for negative bounds)")
    g.add_argument("--max-list-len", type=int, default=4, help="maximum list length (default 4)")
    g.add_argument("--max-iter", type=int, default=1000, help="maximum fixpoint iterations (default 1000)")
    s = p.add_argument_group("solver")
    s.add_argument("--solver", help="CHC solver executable (default: $CLP2CHC_SOLVER, then z3 on PATH)")
    s.add_argument("--solver-arg", action="append", default=[], metavar="ARG",
                   help="extra argument placed before the script path (repeatable)")
    s.add_argument("--timeout", type=float, default=60.0, help="solver wall-clock limit in seconds")
    p.add_argument("--dump-ast", action="store_true", help="print the parsed clauses to stderr")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with 2, which is reserved for solver failures
        return EXIT_INPUT if exc.code == 2 else exc.code
    try:
        bounds = Bounds(args.depth, args.int_range, args.max_list_len, args.max_iter)
    except ValueError as exc:
        print(f"clp2chc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    solver = None
    if args.mode in ("solve", "diff"):
        solver = find_solver(args.solver)
        if solver is None:
            wanted = args.solver or os.environ.get("CLP2CHC_SOLVER") or "z3"
            print(f"clp2chc: error: solver {wanted} not found", file=sys.stderr)
            return EXIT_SOLVER
    cfg = RunConfig(
        input=args.input, output=args.output, style=args.style, peephole=args.peephole,
        force_features=args.force_features, mode=args.mode, bounds=bounds, solver=solver,
        solver_args=tuple(args.solver_arg), timeout=args.timeout, dump_ast=args.dump_ast,
    )
    return run(cfg).exit_code


if __name__ == "__main__":
    sys.exit(main())
