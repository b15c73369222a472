"""Command-line front end.

Exit codes: 0 the property holds, 1 it fails (a witness is printed),
2 unsupported constraint combination, 3 parse or validation error,
4 resource limit, 5 the ``--oracle`` cross-check disagreed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional

from hdec import oracle
from hdec.decision import (
    Check,
    check_consistency,
    check_global_consistency,
    check_losslessness,
)
from hdec.dsl import format_cdc, format_problem, parse_problem
from hdec.errors import HdecError, NegationNotSingleAtom, NotDpControllable, ResourceLimit, ValidationError
from hdec.model import BUTVPI, UTVPI, Y_UIND, Instance, Problem, Tuple, classify_fd, violations
from hdec.separability import (
    FD_ONLY,
    X_UIND_DISJ,
    X_UIND_GC,
    dp_closure,
    extend_to_uind_model,
    separability_pipeline,
)
from hdec.solver import DEFAULT_BUDGET

EXIT_HOLDS, EXIT_FAILS, EXIT_UNSUPPORTED, EXIT_INVALID, EXIT_RESOURCE, EXIT_ORACLE = range(6)
SHOWN_CHECKS = 20


class OracleMismatch(HdecError):
    pass


def theorem_label(tag: str) -> str:
    rules = "none" if tag in (FD_ONLY, X_UIND_GC, X_UIND_DISJ) else "dp"
    return f"{tag}({rules})"


def _witness_json(t: Optional[Tuple]):
    return None if t is None else {"x": list(t.x), "y": list(t.y)}


def _formulas(fs) -> list[str]:
    return [str(f) for f in fs]


def _check_json(c: Check) -> dict:
    return {
        "valuation": c.valuation.report(),
        "filtered_formulas": _formulas(c.filtered),
        "satisfiable": c.result.satisfiable,
    }


def _check_line(c: Check) -> str:
    state = "sat" if c.result.satisfiable else "unsat"
    return f"  {c.valuation}: {state} {{{', '.join(_formulas(c.filtered))}}}"


class Report:
    def __init__(self, command: str):
        self.data: dict = {
            "command": command,
            "verdict": None,
            "theorem_tag": None,
            "witness": None,
            "valuation": None,
            "filtered_formulas": None,
            "timing_ms": None,
        }
        self.lines: list[str] = []

    def set_check(self, c: Optional[Check]) -> None:
        if c is not None:
            self.data["valuation"] = c.valuation.report()
            self.data["filtered_formulas"] = _formulas(c.filtered)

    def emit(self, as_json: bool) -> None:
        if as_json:
            print(json.dumps(self.data, indent=2, ensure_ascii=False, sort_keys=False))
        else:
            print("\n".join(self.lines))


def _load(path: str, mode: Optional[str]) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from e
    return parse_problem(text, mode)


def _opts(args) -> dict:
    return {"budget": args.budget, "parallel": args.parallel}


# Subcommands -----------------------------------------------------------------


def cmd_consistency(args, rep: Report) -> int:
    p = _load(args.file, args.mode)
    v = check_consistency(p.schema, p.cdcs, **_opts(args))
    if args.oracle:
        expected = oracle.brute_force_consistency(p.schema, p.cdcs) is not None
        if expected != v.consistent:
            raise OracleMismatch(f"oracle says consistent={expected}")
    rep.data["verdict"] = "consistent" if v.consistent else "inconsistent"
    rep.lines.append("CONSISTENT" if v.consistent else "INCONSISTENT")
    if v.consistent:
        rep.data["witness"] = _witness_json(v.witness)
        rep.set_check(v.check)
        rep.lines += [
            f"witness: {v.witness}",
            f"valuation: {v.check.valuation}",
            f"filtered: {{{', '.join(_formulas(v.check.filtered))}}}",
        ]
    return EXIT_HOLDS if v.consistent else EXIT_FAILS


def cmd_global(args, rep: Report) -> int:
    p = _load(args.file, args.mode)
    v = check_global_consistency(p.schema, p.cdcs, **_opts(args))
    if args.oracle:
        expected = oracle.brute_force_global_consistency(p.schema, p.cdcs) is None
        if expected != v.globally_consistent:
            raise OracleMismatch(f"oracle says globally consistent={expected}")
    rep.data["verdict"] = "globally-consistent" if v.globally_consistent else "not-globally-consistent"
    if v.globally_consistent:
        rep.lines.append("GLOBALLY CONSISTENT")
        return EXIT_HOLDS
    rep.set_check(v.check)
    rep.lines += [
        f"NOT GLOBALLY CONSISTENT at {v.check.valuation}",
        f"unsatisfiable filtering: {{{', '.join(_formulas(v.check.filtered))}}}",
    ]
    return EXIT_FAILS


def _unsupported(rep: Report, outcome) -> int:
    rep.data["verdict"] = "unsupported"
    rep.data["reason"] = outcome.reason
    rep.data["log"] = list(outcome.log)
    rep.set_check(outcome.gc_failure)
    rep.lines.append(f"UNSUPPORTED: {outcome.reason}")
    if outcome.gc_failure is not None:
        c = outcome.gc_failure
        rep.lines.append(f"global consistency fails at {c.valuation}: {{{', '.join(_formulas(c.filtered))}}}")
    rep.lines += [f"  {line}" for line in outcome.log]
    return EXIT_UNSUPPORTED


def cmd_losslessness(args, rep: Report, extend: bool = False) -> int:
    p = _load(args.file, args.mode)
    outcome = separability_pipeline(p, **_opts(args))
    if not outcome.reduced:
        return _unsupported(rep, outcome)
    v = check_losslessness(p.schema, p.views, outcome.cdcs, **_opts(args))
    if args.oracle:
        expected = oracle.brute_force_losslessness(p.schema, p.views, outcome.cdcs) is None
        if expected != v.lossless:
            raise OracleMismatch(f"oracle says lossless={expected}")
    label = theorem_label(outcome.tag)
    rep.data["verdict"] = "lossless" if v.lossless else "lossy"
    rep.data["theorem_tag"] = outcome.tag
    rep.data["theorem"] = label
    rep.data["log"] = list(outcome.log)
    rep.data["checked"] = [_check_json(c) for c in v.checks]
    rep.lines.append(f"{'LOSSLESS' if v.lossless else 'LOSSY'}, theorem: {label}")
    rep.lines += [f"  {line}" for line in outcome.log]
    if v.lossless:
        rep.lines.append(f"admissible valuations: {len(v.checks)}")
        rep.lines += [_check_line(c) for c in v.checks[:SHOWN_CHECKS]]
        if len(v.checks) > SHOWN_CHECKS:
            rep.lines.append(f"  ... {len(v.checks) - SHOWN_CHECKS} more")
        return EXIT_HOLDS
    rep.data["witness"] = _witness_json(v.witness)
    rep.set_check(v.check)
    rep.lines += [
        f"witness: {v.witness}",
        f"valuation: {v.check.valuation}",
        f"filtered: {{{', '.join(_formulas(v.check.filtered))}}}",
    ]
    if extend and outcome.uinds:
        model = extend_to_uind_model(Instance(frozenset([v.witness])), outcome.cdcs, outcome.uinds, p.schema, budget=args.budget)
        broken = violations(p, model)
        if broken:
            raise HdecError("extended model fails direct evaluation: " + "; ".join(broken))
        rows = model.sorted_rows()
        rep.data["extension"] = [_witness_json(t) for t in rows]
        rep.lines.append(f"model of all constraints ({len(rows)} tuples):")
        rep.lines += [f"  {t}" for t in rows]
    return EXIT_FAILS


def cmd_closure(args, rep: Report) -> int:
    p = _load(args.file, args.mode)
    yu = [u for u in p.uinds if u.kind == Y_UIND]
    cdcs = dp_closure(p.cdcs, yu, p.schema)
    rep.data["verdict"] = "closed"
    rep.data["cdcs"] = [format_cdc(c) for c in cdcs]
    rep.lines += [format_cdc(c) for c in cdcs]
    return EXIT_HOLDS


def cmd_classify(args, rep: Report) -> int:
    p = _load(args.file, args.mode)
    s = p.schema
    items = []
    for u in p.uinds:
        items.append({"constraint": f"uind: {u.label(s)}", "class": u.kind})
    for fd in p.fds:
        try:
            kind = classify_fd(fd, s)
        except ValidationError as e:
            kind = f"mixed ({e})"
        items.append({"constraint": f"fd: {fd}", "class": kind})
    outcome = separability_pipeline(p, **_opts(args))
    rep.data["classification"] = items
    rep.data["cdcs"] = len(p.cdcs)
    rep.data["views"] = len(p.views)
    rep.lines.append(f"{s.name}(x:{s.k}, y:{s.m}), mode {p.mode}: {len(p.cdcs)} CDC(s), {len(p.views)} view(s)")
    rep.lines += [f"  {i['constraint']}: {i['class']}" for i in items]
    if not outcome.reduced:
        return _unsupported(rep, outcome)
    rep.data["verdict"] = "reduced"
    rep.data["theorem_tag"] = outcome.tag
    rep.data["log"] = list(outcome.log)
    rep.lines.append(f"REDUCED, theorem: {theorem_label(outcome.tag)}")
    rep.lines += [f"  {line}" for line in outcome.log]
    return EXIT_HOLDS


def cmd_reduce(args, rep: Report) -> int:
    try:
        text = Path(args.dimacs).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {args.dimacs}: {e.strerror}") from e
    try:
        nvars, clauses = oracle.parse_dimacs(text)
    except ValueError as e:
        raise ValidationError(str(e)) from e
    build = oracle.sat_to_consistency if args.kind == "sat" else oracle.unsat_to_losslessness
    problem = build(nvars, clauses)
    out = format_problem(problem)
    rep.data["verdict"] = "generated"
    rep.data["problem"] = out
    rep.lines.append(out.rstrip("\n"))
    return EXIT_HOLDS


class _Parser(argparse.ArgumentParser):
    # argparse's own exit status 2 would read as "unsupported"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one JSON object")
    common.add_argument("--mode", choices=[UTVPI, BUTVPI], help="override the file's language mode")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="BUTVPI search node budget")
    common.add_argument("--parallel", type=int, default=1, help="worker processes for valuation checks")
    common.add_argument("--oracle", action="store_true", help="cross-check the verdict by brute force")
    common.add_argument("--timing", action="store_true", help="fill in timing_ms in the report")

    ap = _Parser(prog="hdec", description="Decide consistency and lossless horizontal decomposition under CDCs.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("consistency", "is there a tuple satisfying every CDC"),
        ("losslessness", "is the view set lossless under the constraints"),
        ("global-consistency", "does every x-part admit interpreted values"),
        ("closure", "print the CDCs closed under domain propagation"),
        ("classify", "classify UINDs and FDs and run the separability pipeline"),
        ("witness", "losslessness, extending a counterexample to a full model"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("file")
    sp = sub.add_parser("reduce", parents=[common], help="emit a problem from a DIMACS CNF")
    sp.add_argument("kind", choices=["sat", "unsat"])
    sp.add_argument("dimacs")
    return ap


COMMANDS = {
    "consistency": cmd_consistency,
    "losslessness": cmd_losslessness,
    "global-consistency": cmd_global,
    "closure": cmd_closure,
    "classify": cmd_classify,
    "witness": lambda a, r: cmd_losslessness(a, r, extend=True),
    "reduce": cmd_reduce,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report(args.command)
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, rep)
    except (ValidationError, NegationNotSingleAtom) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except OracleMismatch as e:
        print(f"oracle mismatch: {e}", file=sys.stderr)
        return EXIT_ORACLE
    except NotDpControllable as e:
        print(f"unsupported: not dp-controllable: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if args.timing:
        rep.data["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    rep.emit(args.json)
    return code


def main() -> None:
    sys.exit(run())
