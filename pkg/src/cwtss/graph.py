"""Graphs with vertex thresholds, and the ordering primitives built on them.

Vertices are identified by positive integers (``1..n`` in files and in the
public API).  A :class:`Graph` stores adjacency as frozensets keyed by those
ids; nothing here mutates after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class InputError(ValueError):
    """Raised for malformed graphs, orderings or unknown vertex ids."""


@dataclass(frozen=True)
class Graph:
    vertices: tuple[int, ...]
    adjacency: Mapping[int, frozenset[int]]

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "Graph":
        verts = tuple(sorted(set(vertices)))
        adj: dict[int, set[int]] = {v: set() for v in verts}
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if u not in adj or v not in adj:
                raise InputError(f"edge ({u}, {v}) uses an unknown vertex")
            if v in adj[u]:
                raise InputError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        return cls(verts, {v: frozenset(ns) for v, ns in adj.items()})

    @property
    def n(self) -> int:
        return len(self.vertices)

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise InputError(f"unknown vertex {v}") from None

    def edges(self) -> list[tuple[int, int]]:
        """Each edge once as ``(u, v)`` with ``u < v``, sorted."""
        return sorted((u, v) for u in self.vertices for v in self.adjacency[u] if u < v)

    @property
    def m(self) -> int:
        return sum(len(ns) for ns in self.adjacency.values()) // 2

    def __contains__(self, v: object) -> bool:
        return v in self.adjacency


@dataclass(frozen=True)
class ThresholdMap:
    thr: Mapping[int, int]
    t_max: int

    @classmethod
    def of(cls, thr: Mapping[int, int], t_max: int | None = None) -> "ThresholdMap":
        thr = dict(thr)
        if any(t < 0 for t in thr.values()):
            raise InputError("thresholds must be non-negative")
        top = max(thr.values(), default=0)
        if t_max is None:
            t_max = top
        if top > t_max:
            raise InputError(f"threshold {top} exceeds t_max = {t_max}")
        return cls(thr, t_max)

    def __getitem__(self, v: int) -> int:
        try:
            return self.thr[v]
        except KeyError:
            raise InputError(f"no threshold for vertex {v}") from None

    def covers(self, g: Graph) -> bool:
        return all(v in self.thr for v in g.vertices)


def ordering_from_sequence(seq: Sequence[int]) -> dict[int, int]:
    """Turn an activation sequence into ``vertex -> position`` (1-based)."""
    sigma = {v: i for i, v in enumerate(seq, start=1)}
    if len(sigma) != len(seq):
        raise InputError("ordering repeats a vertex")
    return sigma


def sequence_from_ordering(sigma: Mapping[int, int]) -> list[int]:
    return sorted(sigma, key=sigma.__getitem__)


def check_ordering(g: Graph, sigma: Mapping[int, int]) -> None:
    if set(sigma) != set(g.vertices):
        raise InputError("ordering is not total on the vertex set")
    if sorted(sigma.values()) != list(range(1, g.n + 1)):
        raise InputError("ordering is not a bijection onto 1..n")


def incoming_count(g: Graph, sigma: Mapping[int, int], v: int) -> int:
    """Number of neighbors of ``v`` placed before it by ``sigma``."""
    pos = sigma.get(v)
    if pos is None or v not in g:
        raise InputError(f"unknown vertex {v}")
    return sum(1 for u in g.neighbors(v) if sigma[u] < pos)


def deficiency(g: Graph, thr: ThresholdMap, sigma: Mapping[int, int]) -> set[int]:
    """Vertices that ``sigma`` cannot activate on their own.

    ``sigma`` is k-activating exactly when this set has at most k elements,
    and the set itself is then the smallest witness.
    """
    check_ordering(g, sigma)
    return {v for v in g.vertices if incoming_count(g, sigma, v) < thr[v]}
