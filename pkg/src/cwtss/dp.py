"""Exact target set selection by dynamic programming over a clique-width expression.

A *state* at a subexpression fixes the relative activation order of the first
``min(t_max + 1, |class|)`` vertices of every label, referencing each one only
by ``(label, threshold)``, together with an *activation from outside* (afo):
credit toward the threshold of every referenced position and, per label, of
the unreferenced vertices of that label.  The value of a state is the
smallest number of vertices that must be seeded inside the subexpression.

Labels are small integers here (index into :attr:`CompiledExpr.labels`,
ordered by first appearance).  Orderings are tuples of ``(label, threshold)``
pairs, afo maps are tuples: one entry per position and one per label.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass
from bisect import bisect_left
from itertools import combinations, product
from typing import Iterator, NamedTuple, Sequence

from .cwexpr import Eta, Expr, Rho, Union, Vertex, children, labels_of, preorder
from .graph import InputError, ThresholdMap
from .oracle import ResourceLimit

INF = math.inf
DEFAULT_MAX_STATES = 50_000_000

LEAF, UNION, ETA, RHO = range(4)

Order = tuple[tuple[int, int], ...]


class NoSolution(RuntimeError):
    pass


class State(NamedTuple):
    order: Order
    afo_pos: tuple[int, ...]
    afo_lab: tuple[int, ...]

    def encode(self) -> bytes:
        """Injective byte encoding: sizes first, then tuples, position credit, label credit."""
        out = bytearray([len(self.order), len(self.afo_lab)])
        for lab, th in self.order:
            out += bytes((lab, th))
        out += bytes(self.afo_pos)
        out += bytes(self.afo_lab)
        return bytes(out)


@dataclass
class CompiledExpr:
    """Flattened expression with per-node label statistics (preorder indices)."""

    expr: Expr
    labels: list[str]
    t_max: int
    kind: list[int]
    arg: list[tuple[int, ...]]
    kids: list[tuple[int, ...]]
    count: list[tuple[int, ...]]
    tam: list[tuple[int, ...]]
    # thrc[i][label][t] = number of vertices of that label with threshold t
    thrc: list[tuple[tuple[int, ...], ...]]
    maxthr: list[tuple[int, ...]]
    paths: list[str]

    @property
    def width(self) -> int:
        return len(self.labels)

    def label(self, name: str) -> int:
        return self.labels.index(name)


def compile_expr(expr: Expr, thr: ThresholdMap) -> CompiledExpr:
    labels = labels_of(expr)
    lidx = {lab: k for k, lab in enumerate(labels)}
    nodes = list(preorder(expr))
    pos = {id(n): i for i, n in enumerate(nodes)}
    t = thr.t_max
    L = len(labels)
    kind, arg, kids = [], [], []
    paths = ["root"] * len(nodes)
    for i, node in enumerate(nodes):
        kids.append(tuple(pos[id(c)] for c in children(node)))
        for k, c in enumerate(kids[-1]):
            paths[c] = f"{paths[i]}.{k}"
        if isinstance(node, Vertex):
            if node.vid not in thr.thr:
                raise InputError(f"vertex {node.vid} has no threshold")
            kind.append(LEAF)
            arg.append((node.vid, lidx[node.label], thr.thr[node.vid]))
        elif isinstance(node, Union):
            kind.append(UNION)
            arg.append(())
        elif isinstance(node, Eta):
            kind.append(ETA)
            arg.append((lidx[node.a], lidx[node.b]))
        else:
            kind.append(RHO)
            arg.append((lidx[node.src], lidx[node.dst]))

    thrc: list = [None] * len(nodes)
    for i in range(len(nodes) - 1, -1, -1):
        k = kind[i]
        if k == LEAF:
            _, lab, th = arg[i]
            rows = [[0] * (t + 1) for _ in range(L)]
            rows[lab][th] = 1
        elif k == UNION:
            left, right = thrc[kids[i][0]], thrc[kids[i][1]]
            rows = [[x + y for x, y in zip(left[l], right[l])] for l in range(L)]
        elif k == ETA:
            rows = [list(r) for r in thrc[kids[i][0]]]
        else:
            src, dst = arg[i]
            rows = [list(r) for r in thrc[kids[i][0]]]
            rows[dst] = [x + y for x, y in zip(rows[dst], rows[src])]
            rows[src] = [0] * (t + 1)
        thrc[i] = tuple(tuple(r) for r in rows)
    count = [tuple(sum(r) for r in rows) for rows in thrc]
    tam = [tuple(min(t + 1, c) for c in cs) for cs in count]
    maxthr = [
        tuple(max((th for th, c in enumerate(r) if c), default=0) for r in rows) for rows in thrc
    ]
    return CompiledExpr(expr, labels, t, kind, arg, kids, count, tam, thrc, maxthr, paths)


# -- state transformations -------------------------------------------------


def is_nice_local(order: Sequence[tuple[int, int]], a: int, b: int, t_max: int) -> bool:
    """Niceness of a complete ordering to a join between labels ``a`` and ``b``.

    The (t_max+1)-st tuple of either label must come after the that-th tuple
    of the other label, where that = min(t_max, class size).  Because the
    ordering is complete, class sizes up to t_max are read off the tuple
    counts.  Missing tuples make the clause hold.
    """
    pa = [x for x, (lab, _) in enumerate(order) if lab == a]
    pb = [x for x, (lab, _) in enumerate(order) if lab == b]
    for p, q in ((pa, pb), (pb, pa)):
        that_q = min(t_max, len(q))
        if len(p) > t_max and that_q and p[t_max] < q[that_q - 1]:
            return False
    return True


def eta_transform_afo(order, afo_pos, afo_lab, a, b, t_max: int):
    """Credit every address with its earlier neighbors across the new join.

    Positions receive one unit for each earlier position of the opposite
    label; label keys count every position of the opposite label, since label
    keys come after all positions.  Results are capped at ``t_max``.
    ``afo_lab`` may be a tuple indexed by label or a dict keyed by label.
    """
    seen_a = seen_b = 0
    new_pos = []
    for (lab, _), val in zip(order, afo_pos):
        if lab == a:
            new_pos.append(min(t_max, val + seen_b))
            seen_a += 1
        elif lab == b:
            new_pos.append(min(t_max, val + seen_a))
            seen_b += 1
        else:
            new_pos.append(val)
    if isinstance(afo_lab, dict):
        new_lab = dict(afo_lab)
    else:
        new_lab = list(afo_lab)
    new_lab[a] = min(t_max, afo_lab[a] + seen_b)
    new_lab[b] = min(t_max, afo_lab[b] + seen_a)
    return tuple(new_pos), (new_lab if isinstance(new_lab, dict) else tuple(new_lab))


def _threshold_sequences(avail: list[int], k: int) -> list[tuple[int, ...]]:
    """Distinct threshold sequences of length ``k`` drawn from the multiset ``avail``."""
    out: list[tuple[int, ...]] = []
    seq: list[int] = []

    def rec(left: int) -> None:
        if not left:
            out.append(tuple(seq))
            return
        for th, c in enumerate(avail):
            if c > 0:
                avail[th] -= 1
                seq.append(th)
                rec(left - 1)
                seq.pop()
                avail[th] += 1

    rec(k)
    return out


def enumerate_completions(
    order: Order,
    afo_pos: tuple[int, ...],
    afo_lab: Sequence[int],
    tam: Sequence[int],
    thrc: Sequence[Sequence[int]] | None,
    t_max: int,
    floor: Sequence[int] | None = None,
) -> list[tuple[Order, tuple[int, ...]]]:
    """All complete orderings whose per-label prefixes are ``order``.

    ``tam`` gives the complete tuple count per label and ``thrc`` the actual
    threshold multiset per label (``None`` disables the multiset check, so
    any threshold in ``[0, t_max]`` may be appended).  Appended tuples of a
    label go after that label's existing tuples and after index
    ``floor[label]`` of ``order``; otherwise they interleave freely.  Their
    credit is the label's credit.
    """
    L = len(tam)
    have = [0] * L
    last = [-1] * L
    if thrc is None:
        rem = [[tam[l]] * (t_max + 1) for l in range(L)]
    else:
        rem = [list(r) for r in thrc]
    for x, (lab, th) in enumerate(order):
        have[lab] += 1
        last[lab] = x
        rem[lab][th] -= 1
        if rem[lab][th] < 0 and thrc is not None:
            return []
    extra = [tam[l] - have[l] for l in range(L)]
    if any(e < 0 for e in extra):
        return []
    if floor is not None:
        last = [max(x, f) for x, f in zip(last, floor)]
    if not any(extra):
        return [(tuple(order), tuple(afo_pos))]

    grow = [l for l in range(L) if extra[l]]
    seqs = [_threshold_sequences(rem[l], extra[l]) for l in grow]
    if any(not s for s in seqs):
        return []

    n = len(order)
    patterns: list[tuple[int, ...]] = []
    pattern: list[int] = []
    left = list(extra)
    # pattern entries: -1 for the next old tuple, otherwise a label to append

    def rec(i: int, todo: int) -> None:
        if i == n and not todo:
            patterns.append(tuple(pattern))
            return
        if i < n:
            pattern.append(-1)
            rec(i + 1, todo)
            pattern.pop()
        for l in grow:
            if left[l] and last[l] < i:
                left[l] -= 1
                pattern.append(l)
                rec(i, todo - 1)
                pattern.pop()
                left[l] += 1

    rec(0, sum(extra))

    out = []
    slot = {l: k for k, l in enumerate(grow)}
    for pat in patterns:
        for choice in product(*seqs):
            cursor = [0] * len(grow)
            new_order = []
            new_afo = []
            i = 0
            for p in pat:
                if p < 0:
                    new_order.append(order[i])
                    new_afo.append(afo_pos[i])
                    i += 1
                else:
                    k = slot[p]
                    new_order.append((p, choice[k][cursor[k]]))
                    new_afo.append(afo_lab[p])
                    cursor[k] += 1
            out.append((tuple(new_order), tuple(new_afo)))
    return out


def split_orders(
    order: Order,
    afo_pos: tuple[int, ...],
    tam1: Sequence[int],
    tam2: Sequence[int],
    thrc1: Sequence[Sequence[int]] | None = None,
    thrc2: Sequence[Sequence[int]] | None = None,
) -> list[tuple]:
    """Order-preserving distributions of the tuples of ``order`` onto two sides.

    A tuple may go to a side only while that side stays within its per-label
    cap (and, when given, its threshold multiset).  Each result is
    ``(order1, afo1, floor1, order2, afo2, floor2)`` where ``floor[label]`` is
    the last index on that side preceding the parent's final tuple of that
    label: vertices a side still has to reference come after it.
    """
    n = len(order)
    L = len(tam1)
    last = [-1] * L
    for x, (lab, _) in enumerate(order):
        last[lab] = x
    cnt = ([0] * L, [0] * L)
    tams = (tam1, tam2)
    thrcs = (thrc1, thrc2)
    used = ({}, {})
    sides: tuple[list, list] = ([], [])
    out = []

    def rec(j: int) -> None:
        if j == n:
            row = []
            for side in sides:
                row.append(tuple(order[x] for x in side))
                row.append(tuple(afo_pos[x] for x in side))
                row.append(tuple(bisect_left(side, last[l]) - 1 for l in range(L)))
            out.append(tuple(row))
            return
        lab, th = order[j]
        for s in (0, 1):
            if cnt[s][lab] >= tams[s][lab]:
                continue
            tc = thrcs[s]
            if tc is not None and used[s].get(order[j], 0) >= tc[lab][th]:
                continue
            cnt[s][lab] += 1
            used[s][order[j]] = used[s].get(order[j], 0) + 1
            sides[s].append(j)
            rec(j + 1)
            sides[s].pop()
            used[s][order[j]] -= 1
            cnt[s][lab] -= 1

    rec(0)
    return out


def relabel_floor(order: Order, src: int, dst: int, width: int) -> tuple[int, ...]:
    """Per-label floor for completing below a relabeling: both halves of the
    merged class start after the parent's last tuple of ``dst``."""
    last = [-1] * width
    for x, (lab, _) in enumerate(order):
        last[lab] = x
    last[src] = last[dst]
    return tuple(last)


def relabel_orders(order: Order, src: int, dst: int, tam_child: Sequence[int]) -> list[Order]:
    """Undo a relabeling src -> dst: choose which dst tuples were src tuples before.

    The resulting src and dst tuple counts must fit the child's caps.
    Duplicate results (from identical tuples) are removed.  Positions are
    unchanged, so :func:`relabel_floor` applies to every result.
    """
    if any(lab == src for lab, _ in order):
        raise ValueError("ordering above a relabeling cannot hold tuples of the source label")
    positions = [x for x, (lab, _) in enumerate(order) if lab == dst]
    out: dict[Order, None] = {}
    for s in range(len(positions) + 1):
        if s > tam_child[src] or len(positions) - s > tam_child[dst]:
            continue
        for chosen in combinations(positions, s):
            pick = set(chosen)
            out.setdefault(tuple((src, th) if x in pick else (lab, th) for x, (lab, th) in enumerate(order)))
    return list(out)


# -- solver ----------------------------------------------------------------


class Solver:
    """Memoized top-down evaluation of the state table.

    ``memo=False`` re-evaluates every query (tiny inputs only);
    ``check_nice=False`` also explores states that are not nice at joins;
    ``prune=False`` skips the threshold-multiset check;
    ``canonical=False`` keeps afo values exactly as produced.
    """

    def __init__(
        self,
        expr: Expr,
        thr: ThresholdMap,
        *,
        max_states: int = DEFAULT_MAX_STATES,
        memo: bool = True,
        check_nice: bool = True,
        prune: bool = True,
        canonical: bool = True,
        track: bool = False,
    ):
        self.cx = compile_expr(expr, thr)
        self.t = thr.t_max
        self.max_states = max_states
        self.use_memo = memo
        self.check_nice = check_nice
        self.prune = prune
        self.canonical = canonical
        self.track = track
        n = len(self.cx.kind)
        self.full: list[dict] = [dict() for _ in range(n)]
        self.part: list[dict] = [dict() for _ in range(n)]
        self.full_choice: list[dict] = [dict() for _ in range(n)]
        self.part_choice: list[dict] = [dict() for _ in range(n)]
        self.states_expanded = 0
        self.value: float | None = None

    # canonical forms drop credit that can no longer matter
    def _canon_full(self, i, order, apos, alab):
        if not self.canonical:
            return order, apos, alab
        cx, t = self.cx, self.t
        apos = tuple(v if v < th else th for (_, th), v in zip(order, apos))
        cnt, mx = cx.count[i], cx.maxthr[i]
        alab = tuple(0 if cnt[l] <= t + 1 else min(alab[l], mx[l]) for l in range(len(alab)))
        return order, apos, alab

    def _canon_part(self, i, order, apos, alab, floor=None):
        if floor is not None:
            # a floor only matters for labels that still get tuples appended
            tam = self.cx.tam[i]
            have = [0] * len(tam)
            for lab, _ in order:
                have[lab] += 1
            floor = tuple(f if have[l] < tam[l] else -1 for l, f in enumerate(floor))
            if not any(f >= 0 for f in floor):
                floor = None
        if not self.canonical:
            return order, apos, alab, floor
        mx = self.cx.maxthr[i]
        apos = tuple(v if v < th else th for (_, th), v in zip(order, apos))
        alab = tuple(min(v, m) for v, m in zip(alab, mx))
        return order, apos, alab, floor

    def solve_node(self, i: int, order: Order, apos, alab) -> float:
        order, apos, alab = self._canon_full(i, order, apos, alab)
        key = (order, apos, alab)
        memo = self.full[i]
        if self.use_memo and key in memo:
            return memo[key]
        cx = self.cx
        kind = cx.kind[i]
        choice = None
        if kind == LEAF:
            _, lab, th = cx.arg[i]
            if order != ((lab, th),):
                val = INF
            else:
                val = 0 if apos[0] >= th else 1
        elif kind == ETA:
            a, b = cx.arg[i]
            if self.check_nice and not is_nice_local(order, a, b, self.t):
                val = INF
            else:
                npos, nlab = eta_transform_afo(order, apos, alab, a, b, self.t)
                child = cx.kids[i][0]
                val = self.solve_node(child, order, npos, nlab)
                choice = self._canon_full(child, order, npos, nlab)
        elif kind == UNION:
            c1, c2 = cx.kids[i]
            val = INF
            thrc1 = cx.thrc[c1] if self.prune else None
            thrc2 = cx.thrc[c2] if self.prune else None
            for o1, p1, f1, o2, p2, f2 in split_orders(order, apos, cx.tam[c1], cx.tam[c2], thrc1, thrc2):
                v1 = self.solve_partial(c1, o1, p1, alab, f1)
                if v1 >= val:
                    continue
                v2 = self.solve_partial(c2, o2, p2, alab, f2)
                if v1 + v2 < val:
                    val = v1 + v2
                    choice = (self._canon_part(c1, o1, p1, alab, f1), self._canon_part(c2, o2, p2, alab, f2))
                    if val == 0:
                        break
        else:
            src, dst = cx.arg[i]
            child = cx.kids[i][0]
            nlab = list(alab)
            nlab[src] = alab[dst]
            nlab = tuple(nlab)
            floor = relabel_floor(order, src, dst, cx.width)
            val = INF
            for o in relabel_orders(order, src, dst, cx.tam[child]):
                v = self.solve_partial(child, o, apos, nlab, floor)
                if v < val:
                    val = v
                    choice = self._canon_part(child, o, apos, nlab, floor)
                    if val == 0:
                        break
        if self.use_memo:
            memo[key] = val
            if self.track:
                self.full_choice[i][key] = choice
        self.states_expanded += 1
        if self.states_expanded > self.max_states:
            raise ResourceLimit(
                f"state budget of {self.max_states} exceeded at node {cx.paths[i]}"
            )
        return val

    def solve_partial(self, i: int, order: Order, apos, alab, floor=None) -> float:
        """Best value over all completions of a possibly incomplete state."""
        key = self._canon_part(i, order, apos, alab, floor)
        order, apos, alab, floor = key
        memo = self.part[i]
        if self.use_memo and key in memo:
            return memo[key]
        cx = self.cx
        thrc = cx.thrc[i] if self.prune else None
        best, choice = INF, None
        for o, p in enumerate_completions(order, apos, alab, cx.tam[i], thrc, self.t, floor):
            v = self.solve_node(i, o, p, alab)
            if v < best:
                best, choice = v, self._canon_full(i, o, p, alab)
                if best == 0:
                    break
        if self.use_memo:
            memo[key] = best
            if self.track:
                self.part_choice[i][key] = choice
        return best

    def solve(self) -> float:
        if self.value is None:
            zeros = (0,) * self.cx.width
            self.value = _deep(lambda: self.solve_partial(0, (), (), zeros), len(self.cx.kind))
        return self.value

    def witness(self) -> set[int]:
        """Seed set realizing the optimum, read back from the recorded choices."""
        if not (self.track and self.use_memo):
            raise ValueError("witness needs a solver built with track=True and memo=True")
        k = self.solve()
        if k == INF:
            raise NoSolution("no finite target set value")
        cx = self.cx
        zeros = (0,) * cx.width
        seeds: set[int] = set()
        stack = [("p", 0, self._canon_part(0, (), (), zeros))]
        while stack:
            what, i, key = stack.pop()
            if what == "p":
                stack.append(("f", i, self.part_choice[i][key]))
                continue
            kind = cx.kind[i]
            choice = self.full_choice[i][key]
            if kind == LEAF:
                if self.full[i][key] == 1:
                    seeds.add(cx.arg[i][0])
            elif kind == ETA:
                stack.append(("f", cx.kids[i][0], choice))
            elif kind == UNION:
                stack.append(("p", cx.kids[i][0], choice[0]))
                stack.append(("p", cx.kids[i][1], choice[1]))
            else:
                stack.append(("p", cx.kids[i][0], choice))
        return seeds


def _deep(fn, depth_hint: int):
    """Run ``fn`` with enough recursion headroom for an expression of the given size."""
    need = 200 + 8 * depth_hint
    if need <= sys.getrecursionlimit() - 100:
        return fn()
    result: list = []
    error: list = []

    def run():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, need))
        try:
            result.append(fn())
        except BaseException as exc:  # re-raised in the caller's thread
            error.append(exc)
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(min(1 << 30, max(64 << 20, need * 4096)))
    try:
        th = threading.Thread(target=run)
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
    if error:
        raise error[0]
    return result[0]


def solve(expr: Expr, thr: ThresholdMap, **kw) -> float:
    """Minimum target set size of G(expr) (``math.inf`` never occurs for valid input)."""
    return Solver(expr, thr, **kw).solve()


def reconstruct_target_set(expr: Expr, thr: ThresholdMap, **kw) -> tuple[int, set[int]]:
    solver = Solver(expr, thr, track=True, **kw)
    k = solver.solve()
    if k == INF:
        raise NoSolution("no finite target set value")
    return int(k), solver.witness()


# -- enumeration views over complete states ---------------------------------


def completions_of(cx: CompiledExpr, i: int, state: State, prune: bool = True, floor=None) -> list[State]:
    thrc = cx.thrc[i] if prune else None
    return [
        State(o, p, state.afo_lab)
        for o, p in enumerate_completions(state.order, state.afo_pos, state.afo_lab, cx.tam[i], thrc, cx.t_max, floor)
    ]


def enumerate_union_splits(cx: CompiledExpr, i: int, state: State) -> list[tuple[State, State]]:
    """All pairs of complete child states a union state can decompose into."""
    if cx.kind[i] != UNION:
        raise ValueError("not a union node")
    c1, c2 = cx.kids[i]
    out = []
    for o1, p1, f1, o2, p2, f2 in split_orders(state.order, state.afo_pos, cx.tam[c1], cx.tam[c2], cx.thrc[c1], cx.thrc[c2]):
        left = completions_of(cx, c1, State(o1, p1, state.afo_lab), floor=f1)
        right = completions_of(cx, c2, State(o2, p2, state.afo_lab), floor=f2)
        out.extend((s1, s2) for s1 in left for s2 in right)
    return out


def enumerate_relabel_states(cx: CompiledExpr, i: int, state: State) -> list[State]:
    """All complete child states a relabel state can come from (deduplicated)."""
    if cx.kind[i] != RHO:
        raise ValueError("not a relabel node")
    src, dst = cx.arg[i]
    child = cx.kids[i][0]
    nlab = list(state.afo_lab)
    nlab[src] = state.afo_lab[dst]
    seen: dict[State, None] = {}
    floor = relabel_floor(state.order, src, dst, cx.width)
    for o in relabel_orders(state.order, src, dst, cx.tam[child]):
        for s in completions_of(cx, child, State(o, state.afo_pos, tuple(nlab)), floor=floor):
            seen.setdefault(s)
    return list(seen)


def iter_root_states(cx: CompiledExpr) -> Iterator[State]:
    zeros = (0,) * cx.width
    for o, p in enumerate_completions((), (), zeros, cx.tam[0], cx.thrc[0], cx.t_max):
        yield State(o, p, zeros)
