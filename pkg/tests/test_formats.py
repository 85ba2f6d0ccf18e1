import pytest

from cwtss.formats import FormatError, format_tss, parse_tss, read_tss
from cwtss.graph import Graph, ThresholdMap


def test_read_example(example_graph):
    g, thr = example_graph
    assert (g.n, g.m, thr.t_max) == (11, 22, 2)
    assert thr[7] == 1 and thr[9] == 2


def test_round_trip(example_graph):
    g, thr = example_graph
    again_g, again_thr = parse_tss(format_tss(g, thr, comment="copy"))
    assert again_g == g and dict(again_thr.thr) == dict(thr.thr)


def test_labels_written_as_comments():
    g = Graph.from_edges([1, 2], [(1, 2)])
    text = format_tss(g, ThresholdMap.of({1: 0, 2: 1}), labels={1: "a", 2: "b"})
    assert "c label 1 a" in text and "c label 2 b" in text
    assert parse_tss(text)[0] == g


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("n 1 0\n", "before the header"),
        ("p tss 1 0\np tss 1 0\nn 1 0\n", "second header"),
        ("p graph 1 0\nn 1 0\n", "header must be"),
        ("p tss 2 0\nn 1 0\n", "no threshold line for vertex 2"),
        ("p tss 1 0\nn 1 0\nn 1 1\n", "listed twice"),
        ("p tss 1 0\nn 2 0\n", "outside"),
        ("p tss 1 0\nn 1 -1\n", "non-negative"),
        ("p tss 2 1\nn 1 0\nn 2 0\ne 1 1\n", "self-loop"),
        ("p tss 2 2\nn 1 0\nn 2 0\ne 1 2\ne 2 1\n", "listed twice"),
        ("p tss 2 1\nn 1 0\nn 2 0\ne 1 3\n", "outside"),
        ("p tss 2 2\nn 1 0\nn 2 0\ne 1 2\n", "announces 2 edges"),
        ("p tss 1 0\nn 1 x\n", "integers"),
        ("p tss 1 0\nq 1\n", "unknown line type"),
        ("c only a comment\n", "missing"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(FormatError) as info:
        parse_tss(text)
    assert fragment in str(info.value)


def test_error_carries_line_number():
    with pytest.raises(FormatError) as info:
        parse_tss("p tss 1 0\n\nn 1 -4\n")
    assert info.value.line == 3


def test_read_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_tss(tmp_path / "absent.tss")
