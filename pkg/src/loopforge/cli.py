"""Command-line interface.

Exit codes: 0 success, 1 a checked property or search expectation failed,
2 usage or input errors (including tables that are not Latin squares).
Loop arguments are file paths in the table format or ``corpus:<name>``.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import corpus, finder, suites, varieties
from .errors import LoopError
from .loop import chein_double, direct_product, load_loop, serialize_loop
from .steiner import from_point_label, load_system, point_label, steiner_loop, sts9_system, z13_system
from .words import block_length, pi_all, pi_r

STEINER_ENTRIES = {"steiner14", "steiner10"}


class UsageError(Exception):
    pass


def _load(spec):
    if spec.startswith("corpus:"):
        return _corpus(spec[len("corpus:"):])
    return load_loop(spec)


def _corpus(name):
    try:
        return corpus.get(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _source(args):
    if args.corpus and args.loop:
        raise UsageError("give a loop file or --corpus, not both")
    if args.corpus:
        return _corpus(args.corpus), args.corpus
    if args.loop:
        return _load(args.loop), args.loop
    raise UsageError("a loop file or --corpus name is required")


def _requirement(text):
    want = not text.startswith("!")
    name = text.lstrip("!")
    if name not in varieties.PROPERTIES:
        raise UsageError(f"unknown property {name!r}")
    return name, want


def cmd_check(args, out):
    loop, label = _source(args)
    report = varieties.classify(loop)
    suite_results = {}
    if args.suites:
        suite_results = {k: v.as_dict() for k, v in suites.run_suites(loop, report).items()}
    if args.json:
        out.write(json.dumps(varieties.report_dict(loop, report, suite_results, name=label),
                             indent=2, sort_keys=True) + "\n")
    else:
        out.write(f"{label}: order {loop.n}\n")
        for name in varieties.PROPERTIES:
            ok, w = report.properties[name]
            out.write(f"  {name:18s} {'yes' if ok else 'no'}{'' if w is None else f'  witness {w}'}\n")
        for name, res in suite_results.items():
            out.write(f"  suite {name}: {res['passed']} passed, {res['failed']} failed\n")
    status = 0
    for text in args.require or ():
        name, want = _requirement(text)
        if report[name] != want:
            sys.stderr.write(f"requirement {text} not met\n")
            status = 1
    if args.corpus and corpus.check_entry(args.corpus):
        sys.stderr.write(f"{args.corpus} differs from its golden report\n")
        status = 1
    if any(r["failed"] for r in suite_results.values()):
        status = 1
    return status


def cmd_search(args, out):
    overrides = {"mode": args.mode}
    if args.nodes:
        overrides["node_budget"] = args.nodes
    if args.seconds:
        overrides["time_budget"] = args.seconds
    problem = finder.load_problem(args.problem, **overrides)
    result = finder.solve(problem)
    for model in result.models:
        out.write(serialize_loop(model))
        out.write("\n")
    stats = result.stats
    sys.stderr.write(f"{result.status} count={result.count} nodes={stats['nodes']} "
                     f"time={stats['time']:.2f}s{'' if not result.reason else ' (' + result.reason + ')'}\n")
    if args.mode == "count":
        out.write(f"{result.count}\n")
    wanted = {"sat": "SAT", "unsat": "UNSAT"}[args.expect]
    return 0 if result.status == wanted else 1


def cmd_steiner(args, out):
    if args.z13:
        ts = z13_system()
    elif args.sts9:
        ts = sts9_system()
    elif args.file:
        ts = load_system(args.file)
    else:
        raise UsageError("one of --z13, --sts9 or --file is required")
    out.write(serialize_loop(steiner_loop(ts)))
    return 0


def cmd_words(args, out):
    loop, label = _source(args)
    labels = args.labels
    if labels == "auto":
        labels = "points" if args.corpus in STEINER_ENTRIES else "elements"
    try:
        if labels == "points":
            word = tuple(from_point_label(t.strip()) for t in args.word.split(","))
            show = point_label
        else:
            word = tuple(int(t) for t in args.word.split(","))
            show = str
    except ValueError:
        raise UsageError(f"bad word {args.word!r}") from None
    if any(not 0 <= w < loop.n for w in word):
        raise UsageError(f"word {args.word!r} has letters outside the loop")
    if args.ops == "pi":
        values = sorted(pi_all(loop, word))
        out.write("{" + ", ".join(show(v) for v in values) + "}\n")
    elif args.ops == "pir":
        out.write(show(pi_r(loop, word)) + "\n")
    else:
        out.write(f"{block_length(loop, word)}\n")
    return 0


def cmd_product(args, out):
    out.write(serialize_loop(direct_product(_load(args.first), _load(args.second))))
    return 0


def cmd_chein(args, out):
    out.write(serialize_loop(chein_double(_load(args.group))))
    return 0


def cmd_suite(args, out):
    names = args.corpus or corpus.names()
    selected = [args.suite] if args.suite else None
    if args.suite and args.suite not in suites.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(suites.SUITES)}")
    status = 0
    collected = {}
    for name in names:
        loop = _corpus(name)
        results = suites.run_suites(loop, names=selected)
        collected[name] = {k: v.as_dict() for k, v in results.items()}
        for suite, res in results.items():
            if not args.json:
                out.write(f"{name:22s} {suite:26s} passed {res.passed:8d} failed {res.failed}\n")
            if res.failed:
                status = 1
    if args.json:
        out.write(json.dumps(collected, indent=2, sort_keys=True) + "\n")
    return status


def build_parser():
    p = argparse.ArgumentParser(prog="loopforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="classify a loop")
    c.add_argument("loop", nargs="?")
    c.add_argument("--corpus")
    c.add_argument("--json", action="store_true")
    c.add_argument("--suites", action="store_true", help="also run the property suites")
    c.add_argument("--require", action="append", metavar="PROP",
                   help="exit 1 unless PROP holds (or fails, written !PROP)")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("search", help="run the model finder on a problem file")
    s.add_argument("problem")
    s.add_argument("--mode", choices=finder.MODES, default="first")
    s.add_argument("--expect", choices=("sat", "unsat"), default="sat")
    s.add_argument("--nodes", type=int)
    s.add_argument("--seconds", type=float)
    s.set_defaults(func=cmd_search)

    st = sub.add_parser("steiner", help="Steiner loop of a triple system")
    g = st.add_mutually_exclusive_group()
    g.add_argument("--z13", action="store_true")
    g.add_argument("--sts9", action="store_true")
    g.add_argument("--file")
    st.set_defaults(func=cmd_steiner)

    w = sub.add_parser("words", help="products of a word")
    w.add_argument("loop", nargs="?")
    w.add_argument("--corpus")
    w.add_argument("--word", required=True)
    w.add_argument("--ops", choices=("pi", "pir", "blocks"), default="pi")
    w.add_argument("--labels", choices=("auto", "elements", "points"), default="auto",
                   help="points: triple-system labels with e for the identity")
    w.set_defaults(func=cmd_words)

    pr = sub.add_parser("product", help="direct product of two loops")
    pr.add_argument("first")
    pr.add_argument("second")
    pr.set_defaults(func=cmd_product)

    ch = sub.add_parser("chein", help="Moufang double of a group")
    ch.add_argument("group")
    ch.set_defaults(func=cmd_chein)

    su = sub.add_parser("suite", help="run property suites over corpus loops")
    su.add_argument("--suite", "--lemma", dest="suite", help="run only this suite")
    su.add_argument("--corpus", action="append")
    su.add_argument("--json", action="store_true")
    su.set_defaults(func=cmd_suite)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, LoopError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
