"""Reading and writing ``.tss`` graph files.

::

    c comment
    p tss <n> <m>
    n <id> <thr>        one per vertex, ids 1..n
    e <u> <v>           one per edge
"""

from __future__ import annotations

from pathlib import Path

from .graph import Graph, InputError, ThresholdMap


class FormatError(InputError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def parse_tss(text: str) -> tuple[Graph, ThresholdMap]:
    header: tuple[int, int] | None = None
    thr: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag, args = parts[0], parts[1:]
        try:
            nums = [int(x) for x in args[1:]] if tag == "p" else [int(x) for x in args]
        except ValueError:
            raise FormatError(f"expected integers in {raw.strip()!r}", ln) from None
        if tag == "p":
            if header is not None:
                raise FormatError("second header line", ln)
            if len(args) != 3 or args[0] != "tss":
                raise FormatError("header must be 'p tss <n> <m>'", ln)
            header = (nums[0], nums[1])
            continue
        if header is None:
            raise FormatError(f"{tag!r} line before the header", ln)
        n = header[0]
        if tag == "n":
            if len(nums) != 2:
                raise FormatError("vertex line must be 'n <id> <thr>'", ln)
            v, t = nums
            if not 1 <= v <= n:
                raise FormatError(f"vertex id {v} outside 1..{n}", ln)
            if v in thr:
                raise FormatError(f"vertex {v} listed twice", ln)
            if t < 0:
                raise FormatError("thresholds must be non-negative", ln)
            thr[v] = t
        elif tag == "e":
            if len(nums) != 2:
                raise FormatError("edge line must be 'e <u> <v>'", ln)
            u, v = nums
            if not (1 <= u <= n and 1 <= v <= n):
                raise FormatError(f"edge ({u}, {v}) uses a vertex outside 1..{n}", ln)
            if u == v:
                raise FormatError(f"self-loop at vertex {u}", ln)
            key = (min(u, v), max(u, v))
            if key in seen_edges:
                raise FormatError(f"edge ({u}, {v}) listed twice", ln)
            seen_edges.add(key)
            edges.append(key)
        else:
            raise FormatError(f"unknown line type {tag!r}", ln)
    if header is None:
        raise FormatError("missing 'p tss <n> <m>' header")
    n, m = header
    missing = [v for v in range(1, n + 1) if v not in thr]
    if missing:
        raise FormatError(f"no threshold line for vertex {missing[0]}")
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges but {len(edges)} were given")
    return Graph.from_edges(range(1, n + 1), edges), ThresholdMap.of(thr)


def read_tss(path: str | Path) -> tuple[Graph, ThresholdMap]:
    return parse_tss(Path(path).read_text(encoding="utf-8"))


def format_tss(g: Graph, thr: ThresholdMap, comment: str | None = None, labels: dict[int, str] | None = None) -> str:
    lines = []
    if comment:
        lines += [f"c {c}" for c in comment.splitlines()]
    lines.append(f"p tss {g.n} {g.m}")
    for v in g.vertices:
        lines.append(f"n {v} {thr[v]}")
    for u, v in g.edges():
        lines.append(f"e {u} {v}")
    if labels:
        lines += [f"c label {v} {labels[v]}" for v in g.vertices]
    return "\n".join(lines) + "\n"
