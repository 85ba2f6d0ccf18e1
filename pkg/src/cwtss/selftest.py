"""Randomized self-test: DP against the subset oracle, plus the join and repair identities."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .corpus import random_eta_rooted, random_expr, random_graph, random_thresholds
from .cwexpr import Expr, build_biclique, build_clique, build_naive, build_path, evaluate, to_text
from .dp import eta_transform_afo, solve
from .formats import format_tss
from .graph import ThresholdMap, deficiency
from .oracle import adde, brute_force_min_target, deact, is_nice_everywhere, local_ordering_of, niceify


@dataclass
class Failure:
    case: int
    kind: str
    detail: str
    tss: str
    cwe: str

    def dump(self) -> str:
        return (
            f"case {self.case}: {self.kind}: {self.detail}\n"
            f"--- instance.tss\n{self.tss}--- instance.cwe\n{self.cwe}\n"
        )


@dataclass
class SelftestResult:
    cases: int = 0
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _instance(rng: random.Random) -> tuple[Expr, ThresholdMap]:
    t_max = rng.choice((1, 2))
    shape = rng.randrange(5)
    if shape == 0:
        g = random_graph(rng, rng.randint(1, 6), rng.choice((0.3, 0.5, 0.7)))
        expr = build_naive(g)
    elif shape == 1:
        expr = random_expr(rng, rng.randint(2, 7), rng.randint(2, 3))
    elif shape == 2:
        expr = build_path(rng.randint(1, 8))
    elif shape == 3:
        expr = build_clique(rng.randint(1, 6))
    else:
        expr = build_biclique(rng.randint(1, 3), rng.randint(1, 3))
    verts = evaluate(expr).graph.vertices
    return expr, random_thresholds(rng, verts, t_max)


def run_selftest(
    seed: int = 1,
    cases: int = 50,
    solver: Callable[[Expr, ThresholdMap], float] = solve,
) -> SelftestResult:
    """Deterministic for a fixed seed; ``solver`` is swappable so harness tests can break it."""
    rng = random.Random(seed)
    res = SelftestResult()
    for case in range(cases):
        res.cases += 1
        expr, thr = _instance(rng)
        g = evaluate(expr).graph
        k_dp = solver(expr, thr)
        k_or, _ = brute_force_min_target(g, thr)
        res.checks += 1
        if k_dp != k_or:
            res.failures.append(
                Failure(case, "dp != oracle", f"dp={k_dp} oracle={k_or}", format_tss(g, thr), to_text(expr))
            )

        # repair and join identities on a fresh join-rooted expression
        t_max = rng.choice((1, 2))
        eta = random_eta_rooted(rng, rng.randint(3, 7), rng.randint(2, 3))
        lg = evaluate(eta)
        ethr = random_thresholds(rng, lg.graph.vertices, t_max)
        perm = list(lg.graph.vertices)
        rng.shuffle(perm)
        sigma = {v: i for i, v in enumerate(perm, start=1)}
        nice = niceify(sigma, eta, t_max)
        res.checks += 1
        if not is_nice_everywhere(nice, eta, t_max) or not deficiency(lg.graph, ethr, nice) <= deficiency(
            lg.graph, ethr, sigma
        ):
            res.failures.append(
                Failure(case, "niceify", f"sigma={perm}", format_tss(lg.graph, ethr), to_text(eta))
            )
            continue
        order = local_ordering_of(nice, lg, ethr)
        labels = sorted(set(lg.labels.values()))
        apos = tuple(rng.randint(0, t_max) for _ in order)
        alab = {lab: rng.randint(0, t_max) for lab in labels}
        npos, nlab = eta_transform_afo(order, apos, alab, eta.a, eta.b, t_max)
        res.checks += 1
        for v in lg.graph.vertices:
            d = deact(order, nice, lg, v)
            before = apos[d - 1] if isinstance(d, int) else alab[d]
            after = npos[d - 1] if isinstance(d, int) else nlab[d]
            if min(t_max, before + adde(nice, lg, eta.a, eta.b, v)) != after:
                res.failures.append(
                    Failure(case, "join credit", f"vertex {v}", format_tss(lg.graph, ethr), to_text(eta))
                )
                break
    return res
