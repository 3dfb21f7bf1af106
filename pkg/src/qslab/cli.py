"""Command line front end.

Exit codes: 0 success / all claims pass, 1 verification failure or negative
result, 2 usage error, 3 solver budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import families, formulas, forests, game, prefixes, suites
from .structures import dump_structure, load_structure

USAGE_ERROR = 2
BUDGET_ERROR = 3


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_forest(path: str) -> forests.Forest:
    return forests.forest_from_sexp(_read(path))


def _load_words(path: str) -> set[str]:
    out = set()
    for line in _read(path).splitlines():
        line = line.strip()
        if not line:
            continue
        out.add("" if line == "-" else line)
    return out


def cmd_rosen_f(args) -> int:
    print(prefixes.pattern_to_text(prefixes.avoid_pattern(args.prefix)))
    return 0


def cmd_embed(args) -> int:
    s1 = _load_forest(args.s1)
    s2 = _load_forest(args.s2)
    witness = forests.embed(s1, s2)
    if witness is None:
        print("absent")
        return 1
    print(json.dumps({str(k): v for k, v in sorted(witness.items())}))
    return 0


def cmd_words(args) -> int:
    f = _load_forest(args.forest)
    for w in sorted(f.words_up_to(args.max_len), key=lambda w: (len(w), w)):
        print(w if w else "-")
    return 0


def cmd_forest_of(args) -> int:
    words = _load_words(args.words)
    print(forests.forest_to_sexp(forests.forest_of(words)))
    return 0


def cmd_build_structure(args) -> int:
    spec = families.parse_family_spec(args.spec)
    print(dump_structure(families.build(spec)))
    return 0


_FORMULA_KINDS = {
    "tauplus-prefix": lambda seed, neg: formulas.prefix_sentence(seed, neg=neg),
    "rooted-digraph-prefix": lambda seed, neg: formulas.rooted_digraph_sentence(seed, neg=neg),
    "digraph-prefix": lambda seed, neg: formulas.digraph_sentence(seed),
    "tauplus-tree": lambda seed, neg: formulas.tree_sentence(
        forests.forest_from_sexp(seed), neg=neg
    ),
}


def cmd_build_formula(args) -> int:
    build = _FORMULA_KINDS.get(args.kind)
    if build is None:
        print(f"unknown formula kind {args.kind!r}", file=sys.stderr)
        return USAGE_ERROR
    print(formulas.formula_to_sexp(build(args.seed, args.neg)))
    return 0


def cmd_eval(args) -> int:
    structure = load_structure(_read(args.structure))
    phi = formulas.formula_from_sexp(_read(args.formula))
    print("true" if formulas.evaluate(structure, phi) else "false")
    return 0


def cmd_solve(args) -> int:
    board = _load_forest(args.forest)
    a = load_structure(_read(args.a))
    b = load_structure(_read(args.b))
    outcome = game.solve(board, a, b, budget=args.budget)
    print(outcome.winner)
    if args.certificate:
        Path(args.certificate).write_text(
            json.dumps(outcome.certificate, indent=2), encoding="utf-8"
        )
    return 0


def cmd_distinguish(args) -> int:
    board = _load_forest(args.forest)
    a = load_structure(_read(args.a))
    b = load_structure(_read(args.b))
    try:
        phi = game.synthesize_distinguisher(board, a, b, budget=args.budget)
    except game.GameError as e:
        print(str(e), file=sys.stderr)
        return 1
    print(formulas.formula_to_sexp(phi))
    return 0


def cmd_verify(args) -> int:
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        report = suites.run_suite(name, args.max_prefix_len, args.m, args.budget)
        print("\n".join(report.lines()))
        failed = failed or not report.passed
    return 1 if failed else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslab",
        description="A laboratory for quantifier-structure games on finite structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rosen-f", help="print the avoider pattern of a prefix")
    p.add_argument("prefix")
    p.set_defaults(func=cmd_rosen_f)

    p = sub.add_parser("embed", help="find a forest embedding")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("words", help="enumerate readable words of a forest")
    p.add_argument("--forest", required=True)
    p.add_argument("--max-len", type=int, default=4)
    p.set_defaults(func=cmd_words)

    p = sub.add_parser("forest-of", help="canonical forest of a word set file")
    p.add_argument("--words", required=True)
    p.set_defaults(func=cmd_forest_of)

    p = sub.add_parser("build-structure", help="build a family structure (JSON out)")
    p.add_argument("spec", help="e.g. tauplus:A:+:p=EA:m=2")
    p.set_defaults(func=cmd_build_structure)

    p = sub.add_parser("build-formula", help="build a family sentence (sexp out)")
    p.add_argument("kind", choices=sorted(_FORMULA_KINDS))
    p.add_argument("seed", help="prefix, or tree sexp for tree kinds")
    p.add_argument("--neg", action="store_true")
    p.set_defaults(func=cmd_build_formula)

    p = sub.add_parser("eval", help="evaluate a sentence on a structure")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("solve", help="solve the game on a forest between two structures")
    p.add_argument("--forest", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--budget", type=int, default=game.DEFAULT_BUDGET)
    p.add_argument("--certificate", help="write the certificate JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("distinguish", help="synthesize a distinguishing sentence")
    p.add_argument("--forest", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--budget", type=int, default=game.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=sorted(suites.SUITES) + ["all"], required=True)
    p.add_argument("--max-prefix-len", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except game.BudgetExceeded as e:
        print(str(e), file=sys.stderr)
        return BUDGET_ERROR
    except (OSError, ValueError, KeyError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
