"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 simplex budget exhausted,
4 verification failure (a formula or axiom evaluates to false, or a
solution fails its check), 5 task unsolvable (exhaustive search certificate).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .adversary import BUILTIN_MODELS, model_from_json
from .cset import CsetError, SimplicialModel, facets, identity
from .decisions import averaging_protocol
from .homology import betti, boundary_squared_zero
from .inputs import load_input, parse_values, with_agent_values
from .iterate import CANONICAL, FUNCTORIAL, BudgetExceeded, build
from .logic import Checker, ParseError, Verdict, parse, to_text
from .logic.axioms import AXIOMS, axiom_suite
from .protocol import ProtocolFunctor
from .serialize import (
    cset_to_json,
    dumps,
    projection_table,
    task_from_json,
    task_to_json,
    to_dot,
    vcset_to_json,
)
from .tasks import binary_consensus, search, trivial_task, verify_solution

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4
EXIT_UNSOLVABLE = 5

BUDGET_ENV = "PROTOCOMPLEX_BUDGET"
DEFAULT_BUDGET = 200_000

log = logging.getLogger("protocomplex")


class UsageError(Exception):
    pass


def _budget(args) -> int:
    if args.budget is not None:
        budget = args.budget
    else:
        raw = os.environ.get(BUDGET_ENV, str(DEFAULT_BUDGET))
        try:
            budget = int(raw)
        except ValueError:
            raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if budget <= 0:
        raise UsageError("budget must be positive")
    return budget


def _functor(args, agents) -> ProtocolFunctor:
    spec = args.adversary
    if spec in BUILTIN_MODELS:
        return ProtocolFunctor(BUILTIN_MODELS[spec](agents), spec)
    path = Path(spec)
    if not path.exists():
        raise UsageError(
            f"unknown adversary {spec!r}; builtins: {', '.join(sorted(BUILTIN_MODELS))}"
        )
    return ProtocolFunctor(model_from_json(json.loads(path.read_text()), agents), path.stem)


def _alpha(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"invalid rational {text!r}") from None


def _trunc(args, horizon: int):
    """Load input and adversary and build ``horizon`` rounds."""
    if horizon < 0:
        raise UsageError("rounds and horizon must be nonnegative")
    inp = load_input(args.input)
    functor = _functor(args, inp.cset.agents)
    protocol = None
    initial = SimplicialModel(inp.cset, inp.labels)
    if getattr(args, "protocol", None) == "averaging":
        values = inp.values
        if args.values:
            values = with_agent_values(inp.cset, parse_values(args.values))
        if values is None:
            raise UsageError("the averaging protocol needs input values (--values a=0,b=1)")
        protocol = averaging_protocol(functor, _alpha(args.alpha))
        initial = values
    t = build(
        functor,
        initial,
        horizon,
        budget=_budget(args),
        protocol=protocol,
        projection=getattr(args, "projection", FUNCTORIAL),
    )
    if t.labels is None:
        t.labels = [{} for _ in t.rounds]
    return inp, t


def _round_doc(t, n: int) -> dict:
    if t.values is not None:
        doc = vcset_to_json(t.values[n])
    else:
        doc = cset_to_json(t.rounds[n], t.labels[n] if t.labels else None)
    doc["round"] = n
    return doc


def cmd_build(args) -> tuple[int, str]:
    _, t = _trunc(args, 1)
    x = t.rounds[1]
    if args.format == "dot":
        return EXIT_OK, to_dot(x, name="build")
    doc = {
        "complex": _round_doc(t, 1),
        "projection": list(t.next_proj[0].mapping),
        "counts": x.counts(),
        "facets": len(facets(x)),
        "vertices": sum(1 for c in x.colors if c and c & (c - 1) == 0),
    }
    return EXIT_OK, dumps(doc)


def cmd_iterate(args) -> tuple[int, str]:
    _, t = _trunc(args, args.rounds)
    if args.format == "dot":
        return EXIT_OK, to_dot(t.rounds[-1], name=f"round{args.rounds}")
    table = projection_table(t.next_proj)
    summary = {
        "rounds": args.rounds,
        "sizes": t.sizes(),
        "facets": [len(facets(x)) for x in t.rounds],
        "provenance": t.provenance,
        "agreement_with_canonical": [
            str(Fraction(sum(a == b for a, b in zip(p.mapping, c.projection.mapping)), len(p.mapping)))
            for p, c in zip(t.next_proj, t.complexes)
        ],
    }
    if args.outdir:
        out = Path(args.outdir)
        out.mkdir(parents=True, exist_ok=True)
        for n in range(len(t.rounds)):
            (out / f"round_{n}.json").write_text(dumps(_round_doc(t, n)))
        (out / "projections.json").write_text(dumps({"columns": ["round", "simplex", "image"], "rows": table}))
        summary["files"] = [f"round_{n}.json" for n in range(len(t.rounds))] + ["projections.json"]
    else:
        summary["round_complexes"] = [_round_doc(t, n) for n in range(len(t.rounds))]
        summary["projections"] = table
    return EXIT_OK, dumps(summary)


def cmd_check(args) -> tuple[int, str]:
    horizon = args.horizon
    if horizon < args.round:
        raise UsageError(f"horizon {horizon} is below the evaluation round {args.round}")
    _, t = _trunc(args, horizon)
    chk = Checker(t, worlds=args.worlds)
    if args.axioms:
        report = axiom_suite(t, args.axioms, seed=args.seed, checker=chk)
        doc = {"axioms": {k: v.to_json() for k, v in report.items()}, "seed": args.seed}
        bad = any(v.false for v in report.values())
        return (EXIT_VERIFY if bad else EXIT_OK), dumps(doc)
    if not args.formula:
        raise UsageError("check needs --formula or --axioms")
    phi = parse(args.formula)
    worlds = [args.world] if args.world is not None else chk.worlds(args.round)
    results = []
    for w in worlds:
        v = chk.eval(phi, args.round, w)
        entry = {"world": w, "payload": t.rounds[args.round].payloads[w], "verdict": v.value}
        if args.world is not None or v is not Verdict.TRUE:
            entry["trace"] = chk.trace(phi, args.round, w)
        results.append(entry)
    verdicts = {r["verdict"] for r in results}
    doc = {
        "formula": to_text(phi),
        "round": args.round,
        "horizon": horizon,
        "worlds": args.worlds,
        "results": results,
        "summary": {v.value: sum(r["verdict"] == v.value for r in results) for v in Verdict},
    }
    return (EXIT_VERIFY if "false" in verdicts else EXIT_OK), dumps(doc)


def _load_task(spec: str):
    kind, sep, rest = spec.partition(":")
    if sep and kind == "binary_consensus":
        return binary_consensus(int(rest))
    if sep and kind == "trivial":
        return trivial_task(load_input(rest).cset)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"unknown task {spec!r}")
    return task_from_json(json.loads(path.read_text()))


def cmd_solve(args) -> tuple[int, str]:
    task = _load_task(args.task)
    if args.rounds < 0:
        raise UsageError("rounds must be nonnegative")
    functor = _functor(args, task.inputs.agents)
    t = build(functor, task.inputs, args.rounds, budget=_budget(args), projection=args.projection)
    proj = identity(task.inputs) if args.rounds == 0 else t.composite(args.rounds)
    res = search(proj, task)
    doc = {
        "task": task.name,
        "rounds": args.rounds,
        "adversary": args.adversary,
        "solvable": res.solvable,
        "search_nodes": res.nodes,
        "protocol_simplices": len(proj.source),
        "domain_sizes": list(res.domain_sizes),
    }
    if args.emit_task:
        doc["task_json"] = task_to_json(task)
    if not res.solvable:
        doc["certificate"] = "exhaustive search over all simplex assignments found no solution"
        return EXIT_UNSOLVABLE, dumps(doc)
    problems = verify_solution(proj, task, res.morphism)
    doc["solution"] = list(res.morphism.mapping)
    doc["verified"] = not problems
    if problems:
        doc["problems"] = problems
        return EXIT_VERIFY, dumps(doc)
    return EXIT_OK, dumps(doc)


def cmd_betti(args) -> tuple[int, str]:
    if args.rounds:
        _, t = _trunc(args, args.rounds)
        x = t.rounds[-1]
    else:
        x = load_input(args.input).cset
    doc = {
        "betti": list(betti(x)),
        "boundary_squared_zero": boundary_squared_zero(x),
        "rounds": args.rounds,
    }
    return (EXIT_OK if doc["boundary_squared_zero"] else EXIT_VERIFY), dumps(doc)


def cmd_stats(args) -> tuple[int, str]:
    _, t = _trunc(args, args.rounds)
    doc = {
        "rounds": [
            {"round": n, "simplices": len(x), "facets": len(facets(x)), "levels": x.counts()}
            for n, x in enumerate(t.rounds)
        ]
    }
    return EXIT_OK, dumps(doc)


def _common(p: argparse.ArgumentParser, rounds: bool = True):
    p.add_argument(
        "--adversary",
        default="immediate_snapshot",
        help="builtin model (" + ", ".join(sorted(BUILTIN_MODELS)) + ") or adversary JSON file",
    )
    p.add_argument(
        "--input",
        default="simplex:a,b,c",
        help="simplex:a,b,c | glued2:a,b,c@b,c | binary:a,b | cset JSON file",
    )
    if rounds:
        p.add_argument("--rounds", type=int, default=1, help="number of rounds (default 1)")
    p.add_argument(
        "--budget",
        type=int,
        default=None,
        help=f"maximum simplices per round (default ${BUDGET_ENV} or {DEFAULT_BUDGET})",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--format", choices=("json", "dot"), default="json", help="output format")
    p.add_argument("--output", "-o", default=None, help="write output to this file instead of stdout")
    p.add_argument(
        "--projection",
        choices=(FUNCTORIAL, CANONICAL),
        default=FUNCTORIAL,
        help="next-state maps: F^n(q) (default) or the canonical projection of each round",
    )
    p.add_argument("--protocol", choices=("full-information", "averaging"), default="full-information")
    p.add_argument("--alpha", default="1/2", help="averaging weight p/q in (0,1)")
    p.add_argument("--values", default=None, help="input values per agent, e.g. a=0,b=1")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protocomplex",
        description="Protocol complexes of dynamic networks, their free algebras and logic.",
        epilog="exit codes: 0 ok, 2 usage/parse error, 3 budget exhausted, "
        "4 verification failure, 5 unsolvable task",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="one round of the protocol over an input")
    _common(p, rounds=False)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("iterate", help="rounds 0..n with the projection table")
    _common(p)
    p.add_argument("--outdir", default=None, help="write round_<n>.json and projections.json here")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("check", help="evaluate a formula, or run the axiom suite")
    _common(p, rounds=False)
    p.add_argument("--formula", default=None, help="formula text, e.g. 'K[a] in0@a'")
    p.add_argument("--round", type=int, default=0, help="round of the evaluation world")
    p.add_argument("--world", type=int, default=None, help="world id (default: every world)")
    p.add_argument("--horizon", type=int, default=1, help="number of materialised rounds")
    p.add_argument("--worlds", choices=("all", "facets"), default="all", help="which simplices are worlds")
    p.add_argument("--axioms", type=int, default=0, metavar="N", help=f"run N instances of each of {', '.join(AXIOMS)}")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="search for a decision map solving a task")
    _common(p)
    p.add_argument("--task", required=True, help="binary_consensus:<n> | trivial:<input> | task JSON file")
    p.add_argument("--emit-task", action="store_true", help="include the task JSON in the output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("betti", help="GF(2) Betti numbers of the input or of its n-th round")
    _common(p)
    p.set_defaults(func=cmd_betti, rounds=0)

    p = sub.add_parser("stats", help="level-by-level simplex counts per round")
    _common(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        code, text = args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, CsetError, json.JSONDecodeError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
