"""Instance generators for cross-checking the solver against the oracles."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator

from .cwexpr import Eta, Expr, Rho, Union, Vertex, build_biclique, build_clique, build_naive, build_path, evaluate
from .graph import Graph, ThresholdMap


@dataclass
class Instance:
    name: str
    expr: Expr
    thr: ThresholdMap

    @property
    def graph(self) -> Graph:
        return evaluate(self.expr).graph


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    edges = [(u, v) for u, v in combinations(range(1, n + 1), 2) if rng.random() < p]
    return Graph.from_edges(range(1, n + 1), edges)


def random_thresholds(rng: random.Random, vertices, t_max: int) -> ThresholdMap:
    return ThresholdMap.of({v: rng.randint(0, t_max) for v in vertices}, t_max)


def all_graphs(n: int) -> Iterator[Graph]:
    pairs = list(combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(range(1, n + 1), [p for k, p in enumerate(pairs) if mask >> k & 1])


def exhaustive_small(max_n: int = 4, t_max: int = 2) -> Iterator[Instance]:
    """Every labeled graph on up to ``max_n`` vertices with every threshold map."""
    for n in range(1, max_n + 1):
        for g in all_graphs(n):
            expr = build_naive(g)
            for thr in product(range(t_max + 1), repeat=n):
                yield Instance(f"naive n={n} m={g.m} thr={thr}", expr, ThresholdMap.of(dict(zip(g.vertices, thr)), t_max))


def random_expr(rng: random.Random, n: int, labels: int = 3, steps: int | None = None) -> Expr:
    """Random irredundant expression on vertices 1..n over ``labels`` labels.

    Builds a forest bottom-up, mixing joins (only between classes with no
    edges yet), relabelings and unions until one tree remains.
    """
    names = [chr(ord("a") + k) for k in range(labels)]
    # each tree: (expr, classes label -> set of vertices, edge set)
    forest = []
    for v in range(1, n + 1):
        lab = rng.choice(names)
        forest.append((Vertex(v, lab), {lab: {v}}, set()))
    steps = steps if steps is not None else 3 * n
    while len(forest) > 1 or steps > 0:
        steps -= 1
        k = rng.randrange(len(forest))
        expr, cls, edges = forest[k]
        r = rng.random()
        if len(forest) > 1 and (r < 0.4 or steps <= 0):
            j = rng.randrange(len(forest) - 1)
            j = j if j < k else j + 1
            e2, c2, ed2 = forest[j]
            merged = {lab: set(vs) for lab, vs in cls.items()}
            for lab, vs in c2.items():
                merged.setdefault(lab, set()).update(vs)
            new = (Union(expr, e2), merged, edges | ed2)
            forest = [t for x, t in enumerate(forest) if x not in (k, j)] + [new]
        elif r < 0.75:
            present = [lab for lab in names if cls.get(lab)]
            if len(present) < 2:
                continue
            a, b = rng.sample(present, 2)
            if any((min(u, w), max(u, w)) in edges for u in cls[a] for w in cls[b]):
                continue
            new_edges = edges | {(min(u, w), max(u, w)) for u in cls[a] for w in cls[b]}
            forest[k] = (Eta(a, b, expr), cls, new_edges)
        else:
            present = [lab for lab in names if cls.get(lab)]
            src = rng.choice(present)
            dst = rng.choice([lab for lab in names if lab != src])
            new_cls = {lab: set(vs) for lab, vs in cls.items() if lab != src}
            new_cls.setdefault(dst, set()).update(cls[src])
            forest[k] = (Rho(src, dst, expr), new_cls, edges)
    return forest[0][0]


def random_eta_rooted(rng: random.Random, n: int, labels: int = 3) -> Expr:
    """Random irredundant expression whose root is a join adding at least one edge."""
    while True:
        e = random_expr(rng, n, labels)
        lg = evaluate(e)
        cls = lg.classes()
        present = sorted(cls)
        pairs = [
            (a, b)
            for a, b in combinations(present, 2)
            if not any(w in lg.graph.neighbors(u) for u in cls[a] for w in cls[b])
        ]
        if pairs:
            a, b = rng.choice(pairs)
            return Eta(a, b, e)


def oracle_corpus(rng: random.Random, random_n5: int = 40) -> Iterator[Instance]:
    """The acceptance cross-check corpus (naive small graphs, random n=5, builders)."""
    yield from exhaustive_small(4, 2)
    for k in range(random_n5):
        t_max = rng.choice((1, 2))
        g = random_graph(rng, 5, rng.choice((0.3, 0.5, 0.7)))
        yield Instance(f"random n=5 #{k}", build_naive(g), random_thresholds(rng, g.vertices, t_max))
    for t_max in (1, 2):
        for n in range(1, 9):
            yield Instance(f"path n={n} t={t_max}", build_path(n), random_thresholds(rng, range(1, n + 1), t_max))
        for n in range(1, 7):
            yield Instance(f"clique n={n} t={t_max}", build_clique(n), random_thresholds(rng, range(1, n + 1), t_max))
        for a in range(1, 4):
            for b in range(1, 4):
                yield Instance(
                    f"biclique {a}+{b} t={t_max}", build_biclique(a, b), random_thresholds(rng, range(1, a + b + 1), t_max)
                )
