"""Command-line front end: parse -> infer -> break -> solve -> verify.

Every command reads problem files in the S-expression format, prints a
deterministic line-oriented ``key: value`` report to stdout (timing goes
to stderr only, so identical inputs give byte-identical output), and uses
the exit-code contract: 0 success/SAT, 1 diagnostic, 2 I/O failure or cap
exceeded, 10 UNSAT.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, field

from . import symbreak
from .logic import LogicError, format_formula, ground_problem
from .oracle import (CapExceeded, DEFAULT_CAP, is_satisfiable,
                     orbit_partition, check_symmetry_breaking_completeness)
from .problem_io import (ParseError, _read_sexprs, parse_problem,
                         print_interpretation, print_problem)
from .sort_inference import infer_sorts, verify_witness

EXIT_OK = 0
EXIT_DIAGNOSTIC = 1
EXIT_IO = 2
EXIT_UNSAT = 10


@dataclass
class RunReport:
    """Deterministic result summary; timing is reported separately and is
    never part of the digestable payload."""

    command: str
    input_digest: str
    payload: list[tuple[str, str]] = field(default_factory=list)

    def add(self, key: str, value) -> None:
        self.payload.append((key, str(value)))

    def lines(self) -> list[str]:
        out = [f"command: {self.command}", f"input: {self.input_digest}"]
        out += [f"{k}: {v}" for k, v in self.payload]
        return out

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.lines()).encode()).hexdigest()


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _emit(report: RunReport, started: float) -> None:
    for line in report.lines():
        print(line)
    print(f"elapsed: {time.perf_counter() - started:.3f}s", file=sys.stderr)


def _parse_plan(problem, text: str) -> list[symbreak.SchemeRequest]:
    from .logic import DomainElement
    plan: list[symbreak.SchemeRequest] = []
    for node in _read_sexprs(text):
        items = node.items
        head = items[0].text
        if head == "constants":
            names = tuple(a.text for a in items[2].items)
            plan.append(symbreak.ConstantsRequest(items[1].text, names))
        elif head == "unary-range":
            plan.append(symbreak.UnaryRangeRequest(items[1].text))
        elif head == "drd-range":
            plan.append(symbreak.DrdRangeRequest(items[1].text))
        elif head == "unary-pred":
            plan.append(symbreak.UnaryPredicateRequest(items[1].text))
        elif head == "binary-pred":
            sort, idx = items[2].text.split("!")
            plan.append(symbreak.BinaryPredicateRequest(
                items[1].text, DomainElement(sort, int(idx))))
        else:
            raise ParseError(f"unknown scheme '{head}'", node.line, node.col)
    return plan


def cmd_check(args) -> int:
    started = time.perf_counter()
    text = _read_file(args.file)
    problem = parse_problem(text)
    report = RunReport("check", _digest(text))
    report.add("status", "ok")
    report.add("sorts", len(problem.signature.sorts))
    report.add("functions", len(problem.signature.functions))
    report.add("predicates", len(problem.signature.predicates))
    report.add("formulas", len(problem.formulas))
    report.add("pure", str(problem.is_pure).lower())
    _emit(report, started)
    return EXIT_OK


def cmd_infer(args) -> int:
    started = time.perf_counter()
    text = _read_file(args.file)
    problem = parse_problem(text)
    witness = infer_sorts(problem)
    subst = " ".join(f"({new} {old})"
                     for new, old in witness.substitution.mapping)
    out_text = print_problem(witness.generalized) + f"; (subst {subst})\n"
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(out_text)
    report = RunReport("infer", _digest(text))
    report.add("out", args.out)
    report.add("identity", str(witness.is_identity).lower())
    for sort, names in witness.splits:
        report.add(f"split {sort}", " ".join(names))
    if args.verify:
        ok, diags = verify_witness(problem, witness)
        report.add("witness-verified", str(ok).lower())
        for d in diags:
            report.add("diagnostic", d)
        sat_before, _ = is_satisfiable(problem, args.cap)
        sat_after, _ = is_satisfiable(witness.generalized, args.cap)
        report.add("satisfiability-preserved", str(sat_before == sat_after).lower())
        if not ok or sat_before != sat_after:
            _emit(report, started)
            return EXIT_DIAGNOSTIC
    _emit(report, started)
    return EXIT_OK


def cmd_break(args) -> int:
    started = time.perf_counter()
    text = _read_file(args.file)
    problem = parse_problem(text)
    if args.plan == "auto":
        plan = symbreak.default_plan(problem)
    else:
        plan = _parse_plan(problem, _read_file(args.plan))
    extended, applications = symbreak.combine(problem, plan)
    out_text = print_problem(extended)
    audit = symbreak.audit_lines(applications)
    if audit:
        out_text += "\n".join(audit) + "\n"
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(out_text)
    report = RunReport("break", _digest(text))
    report.add("out", args.out)
    report.add("schemes", len(applications))
    report.add("constraints", sum(len(a.formulas) for a in applications))
    for app in applications:
        report.add(f"scheme {app.kind}",
                   f"{','.join(app.symbols)} emitted {len(app.formulas)}")
    if args.verify:
        sat_before, _ = is_satisfiable(problem, args.cap)
        sat_after, _ = is_satisfiable(extended, args.cap)
        report.add("sound", str(sat_before == sat_after).lower())
        constraints = [f for a in applications for f in a.formulas]
        complete, bad = check_symmetry_breaking_completeness(
            problem, constraints, args.cap)
        report.add("complete", str(complete).lower())
        if sat_before != sat_after or not complete:
            _emit(report, started)
            return EXIT_DIAGNOSTIC
    _emit(report, started)
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.perf_counter()
    text = _read_file(args.file)
    problem = parse_problem(text)
    sat, witness = is_satisfiable(problem, args.cap)
    report = RunReport("solve", _digest(text))
    report.add("verdict", "SAT" if sat else "UNSAT")
    if sat and args.witness:
        with open(args.witness, "w", encoding="utf-8") as fh:
            fh.write(print_interpretation(problem, witness))
        report.add("witness", args.witness)
    _emit(report, started)
    if sat and not args.witness:
        sys.stdout.write(print_interpretation(problem, witness))
    return EXIT_OK if sat else EXIT_UNSAT


def cmd_orbits(args) -> int:
    started = time.perf_counter()
    text = _read_file(args.file)
    problem = parse_problem(text)
    part = orbit_partition(problem, args.cap)
    report = RunReport("orbits", _digest(text))
    report.add("classes", part.n_classes)
    for i, (cls, ok) in enumerate(zip(part.classes, part.class_satisfies), start=1):
        report.add(f"orbit {i}", f"size {len(cls)} satisfies {str(ok).lower()}")
    _emit(report, started)
    return EXIT_OK


def cmd_ground(args) -> int:
    started = time.perf_counter()
    text = _read_file(args.file)
    problem = parse_problem(text)
    grounded = ground_problem(problem, args.max_atoms)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(print_problem(grounded))
    report = RunReport("ground", _digest(text))
    report.add("out", args.out)
    report.add("formulas", len(grounded.formulas))
    _emit(report, started)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finsym",
        description="Many-sorted finite model finding with static symmetry breaking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and sort-check a problem file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("infer", help="most-general sort inference")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--seed", type=int, default=0,
                   help="reserved for randomized verification")
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("break", help="generate symmetry-breaking constraints")
    p.add_argument("file")
    p.add_argument("--plan", default="auto",
                   help="'auto' or a plan file of scheme requests")
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--seed", type=int, default=0,
                   help="reserved for randomized verification")
    p.set_defaults(fn=cmd_break)

    p = sub.add_parser("solve", help="brute-force satisfiability")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--witness", help="write the witness interpretation here")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("orbits", help="orbit summary of the interpretation space")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(fn=cmd_orbits)

    p = sub.add_parser("ground", help="expand quantifiers over finite domains")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--max-atoms", type=int, default=10 ** 6)
    p.set_defaults(fn=cmd_ground)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        print(f"space: {e.space}", file=sys.stderr)
        return EXIT_IO
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except symbreak.SchemeError as e:
        print(f"error: {e}", file=sys.stderr)
        if e.ledger is not None:
            for sort, values in e.ledger.entries:
                print(f"ledger {sort}: {' '.join(map(str, values)) or '-'}",
                      file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except LogicError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIAGNOSTIC


if __name__ == "__main__":
    raise SystemExit(main())
