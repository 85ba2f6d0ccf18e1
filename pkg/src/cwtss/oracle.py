"""Ground-truth semantics for target set selection.

Everything here works on explicit graphs and orderings, never on DP states,
so it can serve as an independent check of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence

from .cwexpr import Eta, Expr, LabeledGraph, evaluate, preorder
from .graph import Graph, InputError, ThresholdMap, check_ordering, deficiency

SUBSET_LIMIT = 20
ORDERING_LIMIT = 8


class ResourceLimit(RuntimeError):
    """An exhaustive search or table grew past its configured budget."""


def simulate_activation(g: Graph, thr: ThresholdMap, seeds: Iterable[int]) -> set[int]:
    """Least fixpoint of the threshold activation process started from ``seeds``."""
    active = set(seeds)
    hits = {v: 0 for v in g.vertices}
    frontier = list(active)
    for v in g.vertices:
        if v not in active and thr[v] <= 0:
            active.add(v)
            frontier.append(v)
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w in active:
                    continue
                hits[w] += 1
                if hits[w] >= thr[w]:
                    active.add(w)
                    nxt.append(w)
        frontier = nxt
    return active


def is_target_set(g: Graph, thr: ThresholdMap, seeds: Iterable[int]) -> bool:
    return len(simulate_activation(g, thr, seeds)) == g.n


def brute_force_min_target(
    g: Graph, thr: ThresholdMap, limit: int = SUBSET_LIMIT
) -> tuple[int, set[int]]:
    """Smallest target set by exhaustive search over subsets.

    Subsets are tried by size and then lexicographically, so the returned
    witness is the lexicographically least minimum target set.
    """
    if g.n > limit:
        raise ResourceLimit(f"subset oracle limited to {limit} vertices, got {g.n}")
    for k in range(g.n + 1):
        for s in combinations(g.vertices, k):
            if is_target_set(g, thr, s):
                return k, set(s)
    raise AssertionError("the full vertex set is always a target set")


def min_target_via_orderings(g: Graph, thr: ThresholdMap, limit: int = ORDERING_LIMIT) -> int:
    """Minimum deficiency over all activation orderings."""
    if g.n > limit:
        raise ResourceLimit(f"ordering oracle limited to {limit} vertices, got {g.n}")
    best = g.n
    for perm in permutations(g.vertices):
        sigma = {v: i for i, v in enumerate(perm, start=1)}
        best = min(best, len(deficiency(g, thr, sigma)))
        if best == 0:
            break
    return best


def min_target_with_witness_via_orderings(
    g: Graph, thr: ThresholdMap, limit: int = ORDERING_LIMIT
) -> tuple[int, set[int]]:
    if g.n > limit:
        raise ResourceLimit(f"ordering oracle limited to {limit} vertices, got {g.n}")
    best: set[int] = set(g.vertices)
    for perm in permutations(g.vertices):
        d = deficiency(g, thr, {v: i for i, v in enumerate(perm, start=1)})
        if len(d) < len(best) or (len(d) == len(best) and sorted(d) < sorted(best)):
            best = d
    return len(best), best


# -- local views of a global ordering --------------------------------------


@dataclass(frozen=True)
class CondensedList:
    vertices: tuple[int, ...]
    kept: dict[str, int]


def condense(
    sigma: Mapping[int, int], lg: LabeledGraph, caps: Mapping[str, int]
) -> CondensedList:
    """Keep, per label, only the ``caps[label]`` earliest vertices of that label."""
    classes = lg.classes()
    for lab, cap in caps.items():
        if cap > len(classes.get(lab, ())):
            raise InputError(f"cap {cap} exceeds the {len(classes.get(lab, ()))} vertices of label {lab}")
    taken: dict[str, int] = {}
    out = []
    for v in sorted(lg.graph.vertices, key=sigma.__getitem__):
        lab = lg.labels[v]
        if taken.get(lab, 0) < caps.get(lab, 0):
            taken[lab] = taken.get(lab, 0) + 1
            out.append(v)
    return CondensedList(tuple(out), {lab: taken.get(lab, 0) for lab in caps})


def tamount_caps(lg: LabeledGraph, t_max: int) -> dict[str, int]:
    return {lab: min(t_max + 1, len(vs)) for lab, vs in lg.classes().items()}


def local_ordering_of(
    sigma: Mapping[int, int], lg: LabeledGraph, thr: ThresholdMap
) -> list[tuple[str, int]]:
    """Tuple list of condense(sigma): the complete local ordering sigma extends."""
    cl = condense(sigma, lg, tamount_caps(lg, thr.t_max))
    return [(lg.labels[v], thr[v]) for v in cl.vertices]


def deact(
    order: Sequence[tuple[str, int]], sigma: Mapping[int, int], lg: LabeledGraph, v: int
) -> int | str:
    """Address of ``v`` in a state: its 1-based position in condense(sigma, A), else its label."""
    caps: dict[str, int] = {}
    for lab, _ in order:
        caps[lab] = caps.get(lab, 0) + 1
    cl = condense(sigma, lg, caps)
    for i, u in enumerate(cl.vertices, start=1):
        if u == v:
            return i
    return lg.labels[v]


# -- nice orderings --------------------------------------------------------


def _sorted_class(sigma: Mapping[int, int], lg: LabeledGraph, lab: str) -> list[int]:
    return sorted(lg.classes().get(lab, []), key=sigma.__getitem__)


def _violation(sigma, va: list[int], vb: list[int], t_max: int) -> bool:
    """True when the (t_max+1)-st of ``va`` comes before the that-th of ``vb``."""
    that_b = min(t_max, len(vb))
    if len(va) <= t_max or that_b == 0:
        return False
    return sigma[va[t_max]] < sigma[vb[that_b - 1]]


def is_nice_global(sigma: Mapping[int, int], sub: Expr, t_max: int, lg: LabeledGraph | None = None) -> bool:
    """Whether ``sigma`` is nice to the subexpression ``sub``.

    Label classes are those of G(sub); pass ``lg`` to reuse an evaluation.
    Non-join nodes are vacuously nice.
    """
    if not isinstance(sub, Eta):
        return True
    lg = lg or evaluate(sub)
    va = _sorted_class(sigma, lg, sub.a)
    vb = _sorted_class(sigma, lg, sub.b)
    return not (_violation(sigma, va, vb, t_max) or _violation(sigma, vb, va, t_max))


def is_nice_everywhere(sigma: Mapping[int, int], f: Expr, t_max: int) -> bool:
    return all(is_nice_global(sigma, n, t_max) for n in preorder(f) if isinstance(n, Eta))


def _repair(seq: list[int], va: list[int], vb: list[int], t_max: int) -> list[int] | None:
    """Move the missing early ``vb`` vertices in front of the (t_max+1)-st of ``va``."""
    pos = {v: i for i, v in enumerate(seq)}
    that_b = min(t_max, len(vb))
    if len(va) <= t_max or that_b == 0:
        return None
    i = pos[va[t_max]]
    if i > pos[vb[that_b - 1]]:
        return None
    late = [v for v in vb[:that_b] if pos[v] > i]
    moved = set(late)
    return seq[:i] + late + [v for v in seq[i:] if v not in moved]


def niceify(sigma: Mapping[int, int], f: Expr, t_max: int, max_rounds: int = 1000) -> dict[int, int]:
    """Reorder ``sigma`` so that it is nice to every join of ``f``.

    Joins are visited in preorder (outermost first, left before right).  A
    violation at a join is fixed by pulling the not yet activated vertices
    among the first that(beta) of label beta forward to the position of the
    (t_max+1)-st vertex of label alpha, delaying everything from there on.
    The set of deficient vertices can only shrink.

    A repair at an inner join can break an outer join that was already
    fixed, so passes repeat until one makes no change.
    """
    seq = sorted(sigma, key=sigma.__getitem__)
    joins = [(node, evaluate(node)) for node in preorder(f) if isinstance(node, Eta)]
    for _ in range(max_rounds):
        changed = False
        for node, lg in joins:
            for a, b in ((node.a, node.b), (node.b, node.a)):
                cur = {v: i for i, v in enumerate(seq, start=1)}
                fixed = _repair(seq, _sorted_class(cur, lg, a), _sorted_class(cur, lg, b), t_max)
                if fixed is not None:
                    seq = fixed
                    changed = True
        if not changed:
            return {v: i for i, v in enumerate(seq, start=1)}
    raise RuntimeError(f"niceify did not settle within {max_rounds} passes")


def adde(sigma: Mapping[int, int], lg: LabeledGraph, a: str, b: str, v: int) -> int:
    """Vertices before ``v`` on the opposite side of the join between ``a`` and ``b``."""
    lab = lg.labels[v]
    if lab not in (a, b):
        return 0
    other = b if lab == a else a
    return sum(1 for u, l in lg.labels.items() if l == other and sigma[u] < sigma[v])


def ordering_is_total(g: Graph, sigma: Mapping[int, int]) -> bool:
    try:
        check_ordering(g, sigma)
    except InputError:
        return False
    return True
