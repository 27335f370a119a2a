"""Command-line interface: ``iofair {validate,compose,check,preorder,witness,harness}``.

Exit status is 0 when the queried property holds, 1 when it fails and 2 on
usage or input errors.  ``--json`` prints the report as JSON; the plain
output is rendered from the same report.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures, harness, preorders, verdicts
from .algebra import IncompatibleComponents, compose
from .dsl import DslError, dump_json, emit_dsl, load_file, parse_dsl
from .model import InvalidAutomaton, format_word, violations

SCHEMA = "iofair-report/1"

VERDICTS = {
    "may": verdicts.may,
    "surv": verdicts.surv,
    "should": verdicts.should,
    "must-pr": verdicts.must_pr,
    "must-f": verdicts.must_f,
    "must-f-ab": verdicts.must_f_ab,
}

DEFAULT_REGIME = {
    "may": verdicts.LTS_REGIME,
    "surv": verdicts.LTS_REGIME,
    "should": verdicts.LTS_REGIME,
    "must-pr": verdicts.COMPLEMENTARY,
    "must-f": verdicts.STRONG_REGIME,
    "must-f-ab": verdicts.STRONG_REGIME,
}


class UsageError(Exception):
    pass


def load_ref(ref: str):
    """Resolve ``FILE[:NAME]`` or a fixture name to one automaton."""
    if ref in fixtures.SOURCES:
        return fixtures.get(ref)
    path, _, name = ref.partition(":")
    if not Path(path).exists():
        raise UsageError("no such file or fixture: %s" % ref)
    automata = load_file(path)
    if name:
        for a in automata:
            if a.name == name:
                return a
        raise UsageError("%s has no automaton named %s" % (path, name))
    if len(automata) != 1:
        raise UsageError("%s holds %d automata; pick one with %s:NAME" % (path, len(automata), path))
    return automata[0]


def _render(value, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append("%s%s:" % (pad, k))
                lines.extend(_render(v, indent + 1))
            elif isinstance(v, str) and "\n" in v:
                lines.append("%s%s: |" % (pad, k))
                lines.extend(pad + "  " + ln for ln in v.rstrip("\n").split("\n"))
            else:
                lines.append("%s%s: %s" % (pad, k, _scalar(v)))
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and v:
                lines.append("%s-" % pad)
                lines.extend(_render(v, indent + 1))
            else:
                lines.append("%s- %s" % (pad, _scalar(v)))
    else:
        lines.append(pad + _scalar(value))
    return lines


def _scalar(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def render_text(report: dict) -> str:
    body = {k: v for k, v in report.items() if k != "schema"}
    return "\n".join(_render(body)) + "\n"


def _emit(report, as_json, out):
    report = {"schema": SCHEMA, **report}
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    else:
        out.write(render_text(report))


# -- subcommands -----------------------------------------------------------


def cmd_validate(args, out):
    try:
        raws = parse_dsl(Path(args.file).read_text()) if not args.file.endswith(".json") else \
            _json_raws(Path(args.file).read_text())
    except OSError as exc:
        raise UsageError(str(exc))
    results = []
    for raw in raws:
        probs = violations(raw)
        results.append({"name": raw.get("name"), "valid": not probs,
                        "violations": [str(v) for v in probs]})
    ok = all(r["valid"] for r in results)
    _emit({"command": "validate", "file": args.file, "valid": ok, "automata": results},
          args.json, out)
    return 0 if ok else 1


def _json_raws(text):
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("automata", [data])
    return data


def cmd_compose(args, out):
    automata = [load_ref(r) for r in args.refs]
    comp = compose(automata, kind=args.kind)
    text = dump_json([comp]) + "\n" if args.output and args.output.endswith(".json") else emit_dsl(comp)
    if args.output:
        Path(args.output).write_text(text)
        _emit({"command": "compose", "output": args.output, "name": comp.name,
               "states": len(comp.states), "transitions": len(comp.transitions)}, args.json, out)
    else:
        out.write(text)
    return 0


def cmd_check(args, out):
    system, test = load_ref(args.system), load_ref(args.test)
    regime = verdicts.regime_name(args.regime or DEFAULT_REGIME[args.verdict])
    adm = verdicts.admissible(system, system, test, regime)
    if not adm.ok:
        _emit({"command": "check", "verdict": args.verdict, "regime": regime,
               "error": "inadmissible test", "admissibility": adm.to_dict()}, args.json, out)
        return 2
    v = VERDICTS[args.verdict](system, test, regime)
    _emit({"command": "check", "verdict": args.verdict, "regime": regime,
           "system": system.name, "test": test.name, **v.to_dict()}, args.json, out)
    return 0 if v.holds else 1


def cmd_preorder(args, out):
    a, b = load_ref(args.a), load_ref(args.b)
    fn = preorders.RELATIONS[args.relation]
    if args.relation in ("fair", "must-f", "reward-f"):
        rep = fn(a, b, args.lasso_bound, args.mode)
    else:
        rep = fn(a, b)
    _emit({"command": "preorder", "A": a.name, "B": b.name, **rep.to_dict()}, args.json, out)
    return 0 if rep.holds else 1


def cmd_witness(args, out):
    a, b = load_ref(args.a), load_ref(args.b)
    if args.kind == "may":
        rep = preorders.may_preorder(a, b)
    else:
        rep = preorders.must_f_preorder(a, b, args.lasso_bound, args.mode)
    if not rep.signature_ok:
        raise UsageError("A and B have different signatures")
    report = {"command": "witness", "kind": args.kind, "A": a.name, "B": b.name,
              "counterexample": None if rep.counterexample is None else format_word(rep.counterexample),
              "completeness": rep.completeness, "verification": rep.verification,
              "test": None if rep.witness_test is None else emit_dsl(rep.witness_test)}
    if args.json:
        _emit(report, True, out)
    else:
        out.write(report["test"] or "none\n")
    return 0 if rep.witness_test is None else 1


def cmd_harness(args, out):
    params = harness.GenParams(seed=args.seed, max_states=args.max_states)
    res = harness.run_suite(args.suite, args.trials, args.seed, params)
    _emit({"command": "harness", **res.to_dict()}, args.json, out)
    return 0 if res.ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="iofair", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="emit a JSON report")

    def add_bound(p):
        p.add_argument("--lasso-bound", type=int, default=None,
                       help="word-length bound for infinite fair traces "
                            "(default |A|*|B|+|B| or $IOFAIR_LASSO_BOUND)")
        p.add_argument("--mode", choices=("bounded", "exact"), default="bounded")

    p = sub.add_parser("validate", help="check automata files for well-formedness")
    p.add_argument("file")
    add_json(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compose", help="parallel composition of automata")
    p.add_argument("refs", nargs="+", metavar="REF")
    p.add_argument("-o", "--output")
    p.add_argument("--kind", choices=("io", "lts"), default=None)
    add_json(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check", help="testing verdict for one system and one test")
    p.add_argument("verdict", choices=sorted(VERDICTS))
    p.add_argument("--system", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--regime", choices=verdicts.REGIMES + ("lts", "strong"))
    add_json(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("preorder", help="decide a preorder A ⊑ B")
    p.add_argument("relation", choices=sorted(preorders.RELATIONS))
    p.add_argument("a", metavar="A")
    p.add_argument("b", metavar="B")
    add_bound(p)
    add_json(p)
    p.set_defaults(func=cmd_preorder)

    p = sub.add_parser("witness", help="print a test passed by A but not by B, or 'none'")
    p.add_argument("kind", choices=("may", "fair-must"))
    p.add_argument("a", metavar="A")
    p.add_argument("b", metavar="B")
    add_bound(p)
    add_json(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("harness", help="run a randomized property suite")
    p.add_argument("suite", choices=harness.SUITES)
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=5)
    add_json(p)
    p.set_defaults(func=cmd_harness)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out)
    except (UsageError, DslError, InvalidAutomaton, IncompatibleComponents,
            ValueError, OSError) as exc:
        print("iofair: error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
