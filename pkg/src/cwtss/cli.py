"""Command line front end.

Exit codes: 0 ok, 1 self-test failure, 2 input or validation error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import cwexpr
from .dp import DEFAULT_MAX_STATES, Solver
from .formats import format_tss, read_tss
from .graph import InputError
from .oracle import (
    ORDERING_LIMIT,
    SUBSET_LIMIT,
    ResourceLimit,
    brute_force_min_target,
    min_target_with_witness_via_orderings,
)
from .selftest import run_selftest

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class RunReport:
    min_target_size: Optional[int]
    target_set: Optional[list[int]]
    method: str
    states_expanded: int
    elapsed_ms: int
    instance: dict

    def to_json(self) -> str:
        # field order is the documented key order
        return json.dumps(
            {
                "min_target_size": self.min_target_size,
                "target_set": self.target_set,
                "method": self.method,
                "states_expanded": self.states_expanded,
                "elapsed_ms": self.elapsed_ms,
                "instance": {k: self.instance[k] for k in ("n", "m", "t_max", "width")},
            },
            ensure_ascii=False,
        )

    def to_text(self) -> str:
        inst = self.instance
        lines = [
            f"min target set size: {self.min_target_size}",
            f"method: {self.method}",
            f"instance: n={inst['n']} m={inst['m']} t_max={inst['t_max']} width={inst['width']}",
            f"states expanded: {self.states_expanded}",
            f"elapsed: {self.elapsed_ms} ms",
        ]
        if self.target_set is not None:
            lines.insert(1, "target set: " + " ".join(map(str, self.target_set)))
        return "\n".join(lines)


def _emit(report: RunReport, as_json: bool) -> None:
    print(report.to_json() if as_json else report.to_text())


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _read_expr(path: str) -> cwexpr.Expr:
    return cwexpr.parse_expr(Path(path).read_text(encoding="utf-8"))


def first_mismatch(g, lg) -> str | None:
    """Describe the first difference between a graph file and an evaluated expression."""
    gv, ev = set(g.vertices), set(lg.graph.vertices)
    if gv != ev:
        extra = sorted(gv ^ ev)[0]
        side = "graph file" if extra in gv else "expression"
        return f"vertex {extra} only in the {side}"
    ge, ee = set(g.edges()), set(lg.graph.edges())
    if ge != ee:
        u, v = sorted(ge ^ ee)[0]
        side = "graph file" if (u, v) in ge else "expression"
        return f"edge {u}-{v} only in the {side}"
    return None


def cmd_solve(args) -> int:
    try:
        g, thr = read_tss(args.graph)
        expr = _read_expr(args.expr)
    except (OSError, InputError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    lg = cwexpr.evaluate(expr)
    diff = first_mismatch(g, lg)
    if diff:
        _err(f"expression does not describe the graph: {diff}")
        return EXIT_INPUT
    bad = cwexpr.check_irredundant(expr)
    if bad:
        try:
            expr = cwexpr.normalize(expr)
        except cwexpr.UnsupportedExpression as exc:
            _err(str(exc))
            return EXIT_INPUT
    start = time.perf_counter()
    solver = Solver(expr, thr, max_states=args.max_states, track=args.reconstruct)
    try:
        k = solver.solve()
        seeds = sorted(solver.witness()) if args.reconstruct else None
    except ResourceLimit as exc:
        _err(str(exc))
        return EXIT_RESOURCE
    elapsed = 0 if args.stable else round((time.perf_counter() - start) * 1000)
    report = RunReport(
        int(k),
        seeds,
        "dp",
        solver.states_expanded,
        elapsed,
        {"n": g.n, "m": g.m, "t_max": thr.t_max, "width": cwexpr.width(expr)},
    )
    _emit(report, args.json)
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        g, thr = read_tss(args.graph)
    except (OSError, InputError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        if args.method == "subsets":
            k, seeds = brute_force_min_target(g, thr, SUBSET_LIMIT)
        else:
            k, seeds = min_target_with_witness_via_orderings(g, thr, ORDERING_LIMIT)
    except ResourceLimit as exc:
        _err(str(exc))
        return EXIT_RESOURCE
    elapsed = 0 if args.stable else round((time.perf_counter() - start) * 1000)
    report = RunReport(
        k,
        sorted(seeds),
        f"oracle-{args.method}",
        0,
        elapsed,
        {"n": g.n, "m": g.m, "t_max": thr.t_max, "width": None},
    )
    _emit(report, args.json)
    return EXIT_OK


def cmd_expr(args) -> int:
    try:
        if args.action == "build":
            expr = _build(args.kind, args.params)
            print(cwexpr.to_text(expr))
            return EXIT_OK
        expr = _read_expr(args.file)
        if args.action == "validate":
            bad = cwexpr.check_irredundant(expr)
            if not bad:
                print("irredundant")
                return EXIT_OK
            for path, node in bad:
                print(f"redundant join at {path}: eta {node.a} {node.b}")
            return EXIT_INPUT
        if args.action == "normalize":
            print(cwexpr.to_text(cwexpr.normalize(expr)))
            return EXIT_OK
        # eval
        lg = cwexpr.evaluate(expr)
        from .graph import ThresholdMap

        zero = ThresholdMap.of({v: 0 for v in lg.graph.vertices})
        print(format_tss(lg.graph, zero, comment="evaluated expression; thresholds are placeholders", labels=lg.labels), end="")
        return EXIT_OK
    except (OSError, InputError) as exc:
        _err(str(exc))
        return EXIT_INPUT


def _build(kind: str, params: list[str]) -> cwexpr.Expr:
    if kind == "naive":
        if len(params) != 1:
            raise InputError("usage: expr build naive GRAPH.tss")
        g, _ = read_tss(params[0])
        return cwexpr.build_naive(g)
    try:
        nums = [int(p) for p in params]
    except ValueError:
        raise InputError(f"{kind} expects integer sizes") from None
    want = 2 if kind == "biclique" else 1
    if len(nums) != want:
        raise InputError(f"{kind} expects {want} size argument(s)")
    return cwexpr.build_expr(kind, *nums)


def cmd_selftest(args) -> int:
    res = run_selftest(seed=args.seed, cases=args.cases)
    for f in res.failures:
        print(f.dump())
    status = "PASS" if res.ok else "FAIL"
    print(f"{status}: {res.cases} cases, {res.checks} checks, {len(res.failures)} failures (seed {args.seed})")
    return EXIT_OK if res.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cwtss", description="Exact target set selection over clique-width expressions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="minimum target set via the dynamic program")
    s.add_argument("graph", help=".tss graph file (thresholds)")
    s.add_argument("expr", help=".cwe expression file (structure)")
    s.add_argument("--reconstruct", action="store_true", help="also report a minimum target set")
    s.add_argument("--json", action="store_true")
    s.add_argument("--stable", action="store_true", help="zero timing fields for byte-identical output")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="minimum target set by exhaustive search")
    o.add_argument("graph")
    o.add_argument("--method", choices=("subsets", "orderings"), default="subsets")
    o.add_argument("--json", action="store_true")
    o.add_argument("--stable", action="store_true")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("expr", help="work with .cwe expressions")
    esub = e.add_subparsers(dest="action", required=True)
    for name in ("validate", "normalize", "eval"):
        x = esub.add_parser(name)
        x.add_argument("file")
    b = esub.add_parser("build", help="emit an expression: naive GRAPH | path N | clique N | biclique A B")
    b.add_argument("kind", choices=("naive", "path", "clique", "biclique"))
    b.add_argument("params", nargs="+")
    e.set_defaults(func=cmd_expr)

    t = sub.add_parser("selftest", help="randomized DP-versus-oracle cross-check")
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--cases", type=int, default=50)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
