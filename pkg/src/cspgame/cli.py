"""Command-line front door: solving, matches, generation, reduction, and
the verification suites.

Exit codes: 0 success, 1 property violation or counterexample found,
2 usage error, 3 budget exceeded. Final lines are machine-parseable
`RESULT key=value` records; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .catalog import (
    catalog,
    catalog_entry,
    gen_apriori_tree,
    gen_draw_game,
    gen_random,
    gen_star,
    gen_trailing_tree,
    gen_wheel,
    gen_zugzwang,
    write_catalog,
)
from .model import Move, RulesError, load_instance, save_instance
from .q3sat import Q3SatParseError, parse_q3sat, pad_formula
from .reduction import build_reduction, verify_reduction, write_labels
from .solver import DEFAULT_BUDGET, BudgetExceeded, solve
from .strategies import PlyCapExceeded, make_strategy, run_match
from .verify import SUITES

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def default_budget() -> int:
    env = os.environ.get("CSP_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise RulesError(f"CSP_BUDGET must be an integer, got {env!r}")
    return DEFAULT_BUDGET


def _result(key: str, value) -> None:
    print(f"RESULT {key}={value}")


def _move_json(m: Move) -> dict:
    if m.kind == "step":
        return {"piece": m.piece, "target": m.target}
    return {"pass": True} if m.kind == "pass" else {"null": True}


def cmd_solve(args) -> int:
    inst = load_instance(args.file)
    res = solve(inst, args.budget)
    print(f"value: {res.value}")
    print(f"states: {res.stats.states_visited}  layers: {res.stats.layers_solved}  "
          f"elapsed: {res.stats.elapsed:.3f}s")
    if args.policy:
        payload = [{"state": {"turn": s.turn.value, "pieces_i": list(s.pieces_i),
                              "pieces_ii": list(s.pieces_ii),
                              "remaining": sorted(s.remaining)},
                    "move": _move_json(m),
                    "value": repr(res.values[s])}
                   for s, m in res.policy.items()]
        with open(args.policy, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
        print(f"policy written to {args.policy} ({len(payload)} states)",
              file=sys.stderr)
    _result("value", res.value)
    _result("states", res.stats.states_visited)
    return EXIT_OK


def cmd_match(args) -> int:
    inst = load_instance(args.file)
    strat_i = make_strategy(args.i, args.budget)
    strat_ii = make_strategy(args.ii, args.budget)
    rec = run_match(inst, strat_i, strat_ii, args.ply_cap)
    for idx, ((mover, mv), delta) in enumerate(zip(rec.moves, rec.deltas), 1):
        cap = "  capture" if delta else ""
        print(f"{idx:4d}. {mover.value}: {mv}{cap}", file=sys.stderr)
    print(f"outcome: {rec.outcome} ({rec.reason}, {len(rec.moves)} plies)")
    if rec.flags:
        print(f"flags: {', '.join(rec.flags)}")
    _result("outcome", rec.outcome)
    _result("reason", rec.reason)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "catalog":
        path = write_catalog(args.output, verify_budget=args.budget if args.certify else None)
        print(f"catalog written: {path}")
        _result("manifest", path)
        return EXIT_OK
    if args.family == "wheel":
        inst = gen_wheel(args.n)
    elif args.family == "zugzwang":
        inst = gen_zugzwang(args.budget)
    elif args.family == "draw-game":
        inst = gen_draw_game(args.budget)
    elif args.family == "trailing-tree":
        inst = gen_trailing_tree(args.k, args.d, args.L, args.s)
    elif args.family == "apriori-tree":
        inst = gen_apriori_tree(args.p, args.q)
    elif args.family == "star":
        rays = []
        for part in args.rays.split(";"):
            length, _, cust = part.partition(":")
            positions = tuple(int(c) for c in cust.split(",") if c)
            rays.append((int(length), positions))
        inst = gen_star(rays)
    elif args.family == "random":
        inst = gen_random(args.random_family, args.n, args.customers, args.seed,
                          customers_on="leaves" if args.leaf_customers else "any")
    else:
        entry = catalog_entry(args.family)
        inst = entry.instance
    save_instance(inst, args.output)
    print(f"instance written to {args.output} "
          f"({inst.graph.vertex_count} vertices, {len(inst.customers)} customers)")
    _result("file", args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        formula = parse_q3sat(fh.read())
    padded = pad_formula(formula)
    art = build_reduction(padded, subdivide=not args.no_subdivide)
    labeled = art.primary
    save_instance(labeled.instance, args.output)
    write_labels(labeled, args.output + ".labels")
    print(f"reduction written to {args.output} (+.labels); "
          f"n={art.n} m={art.m} B={art.B}; "
          f"{labeled.instance.graph.vertex_count} vertices, "
          f"{len(labeled.instance.customers)} customers")
    code = EXIT_OK
    if args.audit:
        audit = verify_reduction(art)
        print(audit.format_table())
        _result("audit_ok", audit.ok)
        if not audit.ok:
            code = EXIT_VIOLATION
    _result("file", args.output)
    _result("vertices", labeled.instance.graph.vertex_count)
    _result("customers", len(labeled.instance.customers))
    return code


def cmd_verify(args) -> int:
    suite = SUITES[args.suite]
    kwargs = {}
    if args.max_n is not None:
        kwargs["max_n"] = args.max_n
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.suite not in ("reduction-audit",):
        kwargs.setdefault("budget", args.budget)
    try:
        rep = suite(**kwargs)
    except TypeError:
        kwargs.pop("budget", None)
        rep = suite(**kwargs)
    for line in rep.details:
        print(line, file=sys.stderr)
    print(f"suite {rep.suite}: {'ok' if rep.ok else 'FAILED'} "
          f"({rep.checked} checks, {rep.elapsed:.1f}s)")
    _result("suite", rep.suite)
    _result("ok", rep.ok)
    _result("checked", rep.checked)
    if rep.counterexample is not None and (not rep.ok or args.suite == "conjecture"):
        path = args.counterexample or f"counterexample-{rep.suite}.json"
        save_instance(rep.counterexample, path)
        print(f"counterexample written to {path}")
        _result("counterexample", path)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.budget), host=args.host, port=args.port,
                log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="csp",
        description="Competing Salesmen: exact solving, matches, instance "
                    "generation, the hardness reduction, and verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file exactly")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--policy", help="write the optimal policy as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("match", help="run a match between two strategies")
    p.add_argument("file")
    p.add_argument("--i", required=True, help="player I strategy kind")
    p.add_argument("--ii", required=True, help="player II strategy kind")
    p.add_argument("--ply-cap", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("gen", help="generate an instance (or the whole catalog)")
    p.add_argument("family",
                   help="wheel | zugzwang | draw-game | trailing-tree | "
                        "apriori-tree | star | random | catalog | <catalog name>")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--rays", default="5:1,2,3,4,5;3:1,2,3;3:1,2,3",
                   help="star rays as length:pos,pos;length:pos,...")
    p.add_argument("--random-family", default="tree",
                   choices=("tree", "star", "bipartite", "general"))
    p.add_argument("--customers", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--leaf-customers", action="store_true")
    p.add_argument("--certify", action="store_true",
                   help="verify certificates when writing the catalog")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", help="build the CSP(1,1) instance from a q3cnf file")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--no-subdivide", action="store_true")
    p.add_argument("--audit", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--counterexample", help="path for a counterexample instance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP play service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_serve)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "budget", None) is None and hasattr(args, "budget"):
        try:
            args.budget = default_budget()
        except RulesError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        _result("error", "budget_exceeded")
        return EXIT_BUDGET
    except Q3SatParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RulesError, PlyCapExceeded, FileNotFoundError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
