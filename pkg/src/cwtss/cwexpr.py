"""Clique-width expressions: syntax tree, ``.cwe`` parser, evaluation and statistics.

Concrete syntax (whitespace-insensitive, ``;`` comments to end of line)::

    expr := "(v" id label ")" | "(u" expr expr ")"
          | "(eta" label label expr ")" | "(rho" label label expr ")"

Traversals are iterative so that long path-like expressions do not hit the
interpreter recursion limit.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Union as _U

from .graph import Graph, InputError, ThresholdMap

LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ExprError(InputError):
    """Syntax or structural error in an expression."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        if line is not None:
            msg = f"{line}:{col}: {msg}"
        super().__init__(msg)


class UnsupportedExpression(ExprError):
    """The expression is partially redundant; we do not repair those."""


@dataclass(frozen=True)
class Vertex:
    vid: int
    label: str


@dataclass(frozen=True)
class Union:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Eta:
    a: str
    b: str
    child: "Expr"


@dataclass(frozen=True)
class Rho:
    src: str
    dst: str
    child: "Expr"


Expr = _U[Vertex, Union, Eta, Rho]


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Vertex):
        return ()
    if isinstance(e, Union):
        return (e.left, e.right)
    return (e.child,)


def preorder(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def postorder(e: Expr) -> list[Expr]:
    out = list(preorder(e))
    # reversed preorder visits right subtrees first; children still precede parents
    out.reverse()
    return out


def labels_of(e: Expr) -> list[str]:
    """Labels in order of first appearance in the expression text."""
    seen: dict[str, None] = {}
    for node in preorder(e):
        if isinstance(node, Vertex):
            seen.setdefault(node.label)
        elif isinstance(node, Eta):
            seen.setdefault(node.a)
            seen.setdefault(node.b)
        elif isinstance(node, Rho):
            seen.setdefault(node.src)
            seen.setdefault(node.dst)
    return list(seen)


def width(e: Expr) -> int:
    return len(labels_of(e))


def vertex_ids(e: Expr) -> list[int]:
    return [n.vid for n in preorder(e) if isinstance(n, Vertex)]


def validate(e: Expr) -> None:
    seen: set[int] = set()
    for node in preorder(e):
        if isinstance(node, Vertex):
            if node.vid < 1:
                raise ExprError(f"vertex id must be positive, got {node.vid}")
            if node.vid in seen:
                raise ExprError(f"vertex {node.vid} introduced twice")
            seen.add(node.vid)
        elif isinstance(node, Eta) and node.a == node.b:
            raise ExprError(f"join labels must differ (eta {node.a} {node.b})")
        elif isinstance(node, Rho) and node.src == node.dst:
            raise ExprError(f"relabel labels must differ (rho {node.src} {node.dst})")


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        tok = m.group()
        if tok[0].isspace() or tok[0] == ";":
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = m.start() + tok.rindex("\n") + 1
            continue
        yield tok, line, m.start() - line_start + 1


def parse_expr(text: str) -> Expr:
    """Parse ``.cwe`` source into an expression tree and validate it."""
    toks = list(_tokens(text))
    if not toks:
        raise ExprError("empty expression", 1, 1)
    pos = 0
    seen: set[int] = set()

    def take() -> tuple[str, int, int]:
        nonlocal pos
        if pos >= len(toks):
            last = toks[-1]
            raise ExprError("unexpected end of input", last[1], last[2])
        tok = toks[pos]
        pos += 1
        return tok

    def label() -> str:
        tok, ln, col = take()
        if not LABEL_RE.match(tok):
            raise ExprError(f"invalid label {tok!r}", ln, col)
        return tok

    # frames: [op, args, pending subexpressions, line, col]
    stack: list[list] = []
    result: Expr | None = None
    while True:
        tok, ln, col = take()
        if tok != "(":
            raise ExprError(f"expected '(' but found {tok!r}", ln, col)
        op, oln, ocol = take()
        if op == "v":
            idtok, iln, icol = take()
            if not idtok.isdigit() or int(idtok) < 1:
                raise ExprError(f"invalid vertex id {idtok!r}", iln, icol)
            if int(idtok) in seen:
                raise ExprError(f"vertex {idtok} introduced twice", iln, icol)
            seen.add(int(idtok))
            node: Expr | None = Vertex(int(idtok), label())
            close, cln, ccol = take()
            if close != ")":
                raise ExprError(f"expected ')' but found {close!r}", cln, ccol)
        elif op == "u":
            stack.append(["u", [], 2, oln, ocol])
            node = None
        elif op in ("eta", "rho"):
            a, b = label(), label()
            if a == b:
                what = "join" if op == "eta" else "relabel"
                raise ExprError(f"{what} labels must differ", oln, ocol)
            stack.append([op, [a, b], 1, oln, ocol])
            node = None
        else:
            raise ExprError(f"unknown operation {op!r}", oln, ocol)

        while node is not None:
            if not stack:
                result = node
                break
            frame = stack[-1]
            frame[1].append(node)
            frame[2] -= 1
            if frame[2]:
                node = None
                break
            close, cln, ccol = take()
            if close != ")":
                raise ExprError(f"expected ')' but found {close!r}", cln, ccol)
            stack.pop()
            kind, args = frame[0], frame[1]
            if kind == "u":
                node = Union(args[0], args[1])
            elif kind == "eta":
                node = Eta(args[0], args[1], args[2])
            else:
                node = Rho(args[0], args[1], args[2])
        if result is not None:
            break
    if pos != len(toks):
        _, ln, col = toks[pos]
        raise ExprError("trailing input after expression", ln, col)
    return result


def to_text(e: Expr) -> str:
    """Serialize to ``.cwe`` (single line)."""
    done: dict[int, str] = {}
    for node in postorder(e):
        if isinstance(node, Vertex):
            s = f"(v {node.vid} {node.label})"
        elif isinstance(node, Union):
            s = f"(u {done.pop(id(node.left))} {done.pop(id(node.right))})"
        elif isinstance(node, Eta):
            s = f"(eta {node.a} {node.b} {done.pop(id(node.child))})"
        else:
            s = f"(rho {node.src} {node.dst} {done.pop(id(node.child))})"
        done[id(node)] = s
    return done[id(e)]


# -- evaluation ------------------------------------------------------------


@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    labels: dict[int, str]

    def classes(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for v in self.graph.vertices:
            out.setdefault(self.labels[v], []).append(v)
        return out


def _evaluate_with(e: Expr, on_eta=None) -> LabeledGraph:
    """Bottom-up evaluation; ``on_eta(node, classes, edges)`` sees G(child)."""
    classes: dict[int, dict[str, list[int]]] = {}
    edges: dict[int, set[tuple[int, int]]] = {}
    for node in postorder(e):
        key = id(node)
        if isinstance(node, Vertex):
            classes[key] = {node.label: [node.vid]}
            edges[key] = set()
        elif isinstance(node, Union):
            cl, cr = classes.pop(id(node.left)), classes.pop(id(node.right))
            el, er = edges.pop(id(node.left)), edges.pop(id(node.right))
            if len(cl) < len(cr):
                cl, cr = cr, cl
            for lab, vs in cr.items():
                cl.setdefault(lab, []).extend(vs)
            if len(el) < len(er):
                el, er = er, el
            el |= er
            classes[key], edges[key] = cl, el
        elif isinstance(node, Eta):
            cl, es = classes.pop(id(node.child)), edges.pop(id(node.child))
            if on_eta is not None:
                on_eta(node, cl, es)
            for u in cl.get(node.a, ()):
                for w in cl.get(node.b, ()):
                    es.add((u, w) if u < w else (w, u))
            classes[key], edges[key] = cl, es
        else:
            cl = classes.pop(id(node.child))
            moved = cl.pop(node.src, [])
            if moved:
                cl.setdefault(node.dst, []).extend(moved)
            classes[key], edges[key] = cl, edges.pop(id(node.child))
    labels = {v: lab for lab, vs in classes[id(e)].items() for v in vs}
    graph = Graph.from_edges(labels, sorted(edges[id(e)]))
    return LabeledGraph(graph, labels)


def evaluate(e: Expr) -> LabeledGraph:
    """The labeled graph G(e)."""
    return _evaluate_with(e)


# -- per-node statistics ---------------------------------------------------


@dataclass(frozen=True)
class LabelStats:
    count: int
    tamount: int
    that: int
    thresholds: Counter = field(compare=False)


def label_stats(count: int, t_max: int, thresholds: Counter | None = None) -> LabelStats:
    return LabelStats(count, min(t_max + 1, count), min(t_max, count), thresholds or Counter())


@dataclass
class NodeStats:
    """Per-node label statistics, indexed by preorder position of the node."""

    nodes: list[Expr]
    per_node: list[dict[str, LabelStats]]
    t_max: int

    def index(self, node: Expr) -> int:
        for i, n in enumerate(self.nodes):
            if n is node:
                return i
        raise KeyError("node does not belong to this expression")

    def at(self, node: Expr | int) -> dict[str, LabelStats]:
        i = node if isinstance(node, int) else self.index(node)
        return self.per_node[i]

    def get(self, node: Expr | int, label: str) -> LabelStats:
        return self.at(node).get(label) or label_stats(0, self.t_max)

    @property
    def root(self) -> dict[str, LabelStats]:
        return self.per_node[0]


def node_stats(e: Expr, thr: ThresholdMap) -> NodeStats:
    nodes = list(preorder(e))
    pos = {id(n): i for i, n in enumerate(nodes)}
    thrs: list[dict[str, Counter] | None] = [None] * len(nodes)
    for i in range(len(nodes) - 1, -1, -1):
        node = nodes[i]
        if isinstance(node, Vertex):
            if node.vid not in thr.thr:
                raise InputError(f"vertex {node.vid} has no threshold")
            thrs[i] = {node.label: Counter([thr.thr[node.vid]])}
        elif isinstance(node, Union):
            left, right = thrs[pos[id(node.left)]], thrs[pos[id(node.right)]]
            merged = {lab: Counter(c) for lab, c in left.items()}
            for lab, c in right.items():
                merged.setdefault(lab, Counter()).update(c)
            thrs[i] = merged
        elif isinstance(node, Eta):
            thrs[i] = thrs[pos[id(node.child)]]
        else:
            child = dict(thrs[pos[id(node.child)]])
            moved = child.pop(node.src, None)
            if moved:
                merged = Counter(child.get(node.dst, Counter()))
                merged.update(moved)
                child[node.dst] = merged
            thrs[i] = child
    per_node = [
        {lab: label_stats(sum(c.values()), thr.t_max, c) for lab, c in d.items()} for d in thrs
    ]
    return NodeStats(nodes, per_node, thr.t_max)


# -- irredundancy ----------------------------------------------------------


def _node_paths(e: Expr) -> dict[int, str]:
    paths = {id(e): "root"}
    for node in preorder(e):
        for k, c in enumerate(children(node)):
            paths[id(c)] = f"{paths[id(node)]}.{k}"
    return paths


def _cross_edges(node: Eta, classes, edges) -> tuple[int, int]:
    xs, ys = classes.get(node.a, []), classes.get(node.b, [])
    existing = sum(1 for u in xs for w in ys if ((u, w) if u < w else (w, u)) in edges)
    return existing, len(xs) * len(ys)


def check_irredundant(e: Expr) -> list[tuple[str, Eta]]:
    """Eta nodes whose child graph already has an edge between the joined classes."""
    paths = _node_paths(e)
    bad: list[tuple[str, Eta]] = []

    def visit(node, classes, edges):
        existing, _ = _cross_edges(node, classes, edges)
        if existing:
            bad.append((paths[id(node)], node))

    _evaluate_with(e, visit)
    bad.sort(key=lambda pe: pe[0])
    return bad


def normalize(e: Expr) -> Expr:
    """Drop joins that add no new edge; reject joins that add only some."""
    paths = _node_paths(e)
    redundant: set[int] = set()

    def visit(node, classes, edges):
        existing, total = _cross_edges(node, classes, edges)
        if existing == 0:
            return
        if existing < total:
            raise UnsupportedExpression(
                f"partially redundant join at {paths[id(node)]} "
                f"(eta {node.a} {node.b}: {existing} of {total} edges already present)"
            )
        redundant.add(id(node))

    _evaluate_with(e, visit)
    if not redundant:
        return e
    rebuilt: dict[int, Expr] = {}
    for node in postorder(e):
        if isinstance(node, Vertex):
            new = node
        elif isinstance(node, Union):
            new = Union(rebuilt.pop(id(node.left)), rebuilt.pop(id(node.right)))
        elif isinstance(node, Eta):
            child = rebuilt.pop(id(node.child))
            new = child if id(node) in redundant else Eta(node.a, node.b, child)
        else:
            new = Rho(node.src, node.dst, rebuilt.pop(id(node.child)))
        rebuilt[id(node)] = new
    return rebuilt[id(e)]


# -- builders --------------------------------------------------------------


def union_all(parts: list[Expr]) -> Expr:
    """Right-nested union of ``parts`` (which must be non-empty)."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Union(p, out)
    return out


def build_naive(g: Graph) -> Expr:
    """One label per vertex and one join per edge; width equals n."""
    if g.n == 0:
        raise InputError("cannot build an expression for the empty graph")
    out = union_all([Vertex(v, f"x{v}") for v in g.vertices])
    for u, v in g.edges():
        out = Eta(f"x{u}", f"x{v}", out)
    return out


def build_path(n: int) -> Expr:
    """P_n on vertices 1..n using labels a (finished), b (current end), c (new)."""
    if n < 1:
        raise InputError("path needs n >= 1")
    out: Expr = Vertex(1, "b")
    for i in range(2, n + 1):
        out = Rho("c", "b", Rho("b", "a", Eta("b", "c", Union(out, Vertex(i, "c")))))
    return out


def build_clique(n: int) -> Expr:
    if n < 1:
        raise InputError("clique needs n >= 1")
    out: Expr = Vertex(1, "a")
    for i in range(2, n + 1):
        out = Rho("b", "a", Eta("a", "b", Union(out, Vertex(i, "b"))))
    return out


def build_biclique(a: int, b: int) -> Expr:
    """K_{a,b}: vertices 1..a on the left, a+1..a+b on the right."""
    if a < 0 or b < 0 or a + b < 1:
        raise InputError("biclique needs a + b >= 1")
    left = [Vertex(i, "l") for i in range(1, a + 1)]
    right = [Vertex(i, "r") for i in range(a + 1, a + b + 1)]
    out = union_all(left + right)
    return Eta("l", "r", out) if a and b else out


def build_expr(kind: str, *args) -> Expr:
    builders = {
        "naive": build_naive,
        "path": build_path,
        "clique": build_clique,
        "biclique": build_biclique,
        "complete_bipartite": build_biclique,
    }
    try:
        return builders[kind](*args)
    except KeyError:
        raise InputError(f"unknown builder {kind!r}") from None
