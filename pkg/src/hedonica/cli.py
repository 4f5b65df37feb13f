"""``hedonica`` command line: reduce, construct, extract, check, solve, verify-family, dynamics, stats.

Exit codes: 0 success/stable, 1 unstable or failed, 2 malformed input,
3 inconclusive bounded check, 4 instance above the exhaustive caps.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import io
from .families import Family, HedonicGame
from .model import graph_stats, underlying_graph
from .properties import CLAIMS, Theorem, verify_family_contract
from .reductions import (ExtractionError, FormulaError, Reduction, build_gadget, construct_partition,
                         cycle_gadget, extract_assignment, parse_cnf, sat_oracle, validate_b2sat)
from .stability import CapExceeded, Concept, exists_stable, is_stable, run_dynamics

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BOUNDED, EXIT_CAP = 0, 1, 2, 3, 4


def workers() -> int:
    try:
        return max(1, int(os.environ.get("HEDONICA_THREADS", "1")))
    except ValueError:
        return 1


def _err(msg: str) -> None:
    print(f"hedonica: {msg}", file=sys.stderr)


def _read_formula(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise io.InputError(str(exc)) from None
    formula = parse_cnf(text)
    problem = validate_b2sat(formula)
    if problem:
        raise FormulaError(problem)
    return formula


def _parse_assignment(text: str | None, formula):
    if text is None:
        a = sat_oracle(formula)
        if a is None:
            raise io.InputError("formula is unsatisfiable")
        return a
    out = {}
    for tok in text.replace(",", " ").split():
        lit = int(tok)
        out[abs(lit)] = lit > 0
    missing = [v for v in range(1, formula.num_vars + 1) if v not in out]
    if missing:
        raise io.InputError(f"assignment misses variables {missing}")
    return out


def _emit_dot(path: str | None, profile) -> None:
    if path:
        io.write_text(path, underlying_graph(profile).to_dot())


# --- commands -----------------------------------------------------------------------

def cmd_reduce(args) -> int:
    params = {"l": args.l} if args.l is not None else None
    if args.cycle is not None:
        profile = cycle_gadget(args.cycle)
        game = HedonicGame(profile, args.family, params)
        gadget = None
    else:
        if not args.cnf or not args.theorem:
            raise io.InputError("reduce needs --theorem and a CNF file (or --cycle)")
        formula = _read_formula(args.cnf)
        gadget = build_gadget(args.theorem, formula)
        game = HedonicGame(gadget.profile, args.family, params)
    io.write_text(args.output, io.dumps(io.game_to_dict(game, gadget)))
    stats = graph_stats(underlying_graph(game.profile)).to_dict()
    print(f"agents: {game.n}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    print(io.dumps(stats), end="", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    _emit_dot(args.emit_dot, game.profile)
    return EXIT_OK


def cmd_construct(args) -> int:
    formula = _read_formula(args.cnf)
    assignment = _parse_assignment(args.assignment, formula)
    if not formula.satisfied_by(assignment):
        raise io.InputError("assignment does not satisfy the formula")
    part = construct_partition(args.theorem, formula, assignment)
    io.write_text(args.output, io.dumps(io.partition_to_list(part)))
    return EXIT_OK


def cmd_extract(args) -> int:
    game, gadget = io.load_game(args.game)
    if gadget is None:
        raise io.InputError("game has no reduction roles table")
    part = io.load_partition(args.partition, game.n)
    try:
        a = extract_assignment(gadget.theorem, gadget, part)
    except ExtractionError as exc:
        print(io.dumps({"error": str(exc)}), end="")
        return EXIT_FAIL
    print(io.dumps({"assignment": {str(v): b for v, b in sorted(a.items())},
                    "satisfies": gadget.formula.satisfied_by(a)}), end="")
    return EXIT_OK


def cmd_check(args) -> int:
    game, _ = io.load_game(args.game)
    part = io.load_partition(args.partition, game.n)
    report = is_stable(game, part, args.concept, max_size=args.max_size, max_h=args.max_h)
    print(io.dumps(report.to_dict()), end="")
    if not report.stable:
        return EXIT_FAIL
    return EXIT_OK if report.exhaustive else EXIT_BOUNDED


def cmd_solve(args) -> int:
    game, _ = io.load_game(args.game)
    try:
        found = exists_stable(game, args.concept)
    except CapExceeded as exc:
        _err(str(exc))
        return EXIT_CAP
    if found is None:
        print(io.dumps("none"), end="")
        return EXIT_FAIL
    print(io.dumps(io.partition_to_list(found)), end="")
    return EXIT_OK


def cmd_verify_family(args) -> int:
    family = Family.parse(args.family)
    theorem = Theorem.parse(args.theorem)
    if args.n > 12:
        raise io.InputError("verify-family needs --n <= 12")
    seed = args.seed if args.sub_seed is None else args.sub_seed
    result = verify_family_contract(family, theorem, n=args.n, seeds=args.seeds, seed=seed,
                                    workers=workers()).to_dict()
    result["claimed"] = theorem in CLAIMS[family]
    print(io.dumps(result), end="")
    return EXIT_OK if result["holds"] else EXIT_FAIL


def cmd_dynamics(args) -> int:
    game, _ = io.load_game(args.game)
    if args.start in (None, "singletons"):
        start = [[i] for i in range(game.n)]
    else:
        start = io.load_partition(args.start, game.n)
    out = run_dynamics(game, args.concept, start, budget=args.budget)
    print(io.dumps(out.to_dict()), end="")
    return EXIT_OK if out.status == "stabilized" else EXIT_FAIL


def cmd_stats(args) -> int:
    game, gadget = io.load_game(args.game)
    data = graph_stats(underlying_graph(game.profile)).to_dict()
    data["n"] = game.n
    data["strict"] = game.profile.is_strict
    data["max_friends"] = game.profile.max_friends()
    if gadget is not None:
        data["theorem"] = gadget.theorem.value
    print(io.dumps(data), end="")
    _emit_dot(args.emit_dot, game.profile)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hedonica", description="Hedonic-game stability toolkit")
    p.add_argument("--seed", type=int, default=0, help="seed for all sampling (PRNG python-random/MT19937)")
    sub = p.add_subparsers(dest="command", required=True)
    theorems = [t.value for t in Reduction]
    concepts = [c.value for c in Concept]

    r = sub.add_parser("reduce", help="compile a (3,B2) formula into a gadget game")
    r.add_argument("--theorem", choices=theorems)
    r.add_argument("--family", required=True)
    r.add_argument("--l", type=int, default=None, help="l for l-approval (>= 4)")
    r.add_argument("--cycle", type=int, choices=(5, 9), help="emit the pentagon / 9-gon instead of a reduction")
    r.add_argument("--emit-dot", default=None)
    r.add_argument("-o", "--output", default=None)
    r.add_argument("cnf", nargs="?")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("construct", help="canonical partition for a satisfying assignment")
    c.add_argument("--theorem", choices=theorems, required=True)
    c.add_argument("--assignment", default=None, help="signed literals, e.g. '1 -2 3'; default: first oracle model")
    c.add_argument("-o", "--output", default=None)
    c.add_argument("cnf")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("extract", help="read an assignment off a gadget partition")
    e.add_argument("game")
    e.add_argument("partition")
    e.set_defaults(func=cmd_extract)

    k = sub.add_parser("check", help="decide stability of a partition")
    k.add_argument("--concept", choices=concepts, required=True)
    k.add_argument("--max-size", type=int, default=None)
    k.add_argument("--max-h", type=int, default=None)
    k.add_argument("game")
    k.add_argument("partition")
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="exhaustive search for a stable partition")
    s.add_argument("--concept", choices=concepts, required=True)
    s.add_argument("game")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify-family", help="check a family's property contract on random profiles")
    v.add_argument("--family", required=True)
    v.add_argument("--theorem", required=True, choices=[t.value for t in Theorem] + ["t2nb"])
    v.add_argument("--n", type=int, default=7)
    v.add_argument("--seeds", type=int, default=100)
    v.add_argument("--seed", dest="sub_seed", type=int, default=None)
    v.set_defaults(func=cmd_verify_family)

    d = sub.add_parser("dynamics", help="run NS/IS better-response dynamics")
    d.add_argument("--concept", choices=("ns", "is"), required=True)
    d.add_argument("--budget", type=int, default=10_000)
    d.add_argument("--start", default=None, help="partition JSON (default: singletons)")
    d.add_argument("game")
    d.set_defaults(func=cmd_dynamics)

    t = sub.add_parser("stats", help="friendship-graph statistics")
    t.add_argument("--emit-dot", default=None)
    t.add_argument("game")
    t.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (io.InputError, FormulaError, ExtractionError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
