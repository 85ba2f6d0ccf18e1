import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwtss.graph import (
    Graph,
    InputError,
    ThresholdMap,
    check_ordering,
    deficiency,
    incoming_count,
    ordering_from_sequence,
    sequence_from_ordering,
)


def path3():
    return Graph.from_edges([1, 2, 3], [(1, 2), (2, 3)])


def test_graph_rejects_self_loop():
    with pytest.raises(InputError):
        Graph.from_edges([1], [(1, 1)])


def test_graph_rejects_duplicate_edge():
    with pytest.raises(InputError):
        Graph.from_edges([1, 2], [(1, 2), (2, 1)])


def test_graph_rejects_unknown_endpoint():
    with pytest.raises(InputError):
        Graph.from_edges([1, 2], [(1, 3)])


def test_adjacency_is_symmetric():
    g = path3()
    assert 1 in g.neighbors(2) and 2 in g.neighbors(1)
    assert g.edges() == [(1, 2), (2, 3)]
    assert (g.n, g.m) == (3, 2)


def test_threshold_map_checks_bounds():
    with pytest.raises(InputError):
        ThresholdMap.of({1: -1})
    with pytest.raises(InputError):
        ThresholdMap.of({1: 3}, t_max=2)
    assert ThresholdMap.of({1: 0, 2: 2}).t_max == 2


def test_incoming_on_p3():
    assert incoming_count(path3(), {1: 1, 2: 2, 3: 3}, 2) == 1


def test_incoming_isolated_vertex():
    g = Graph.from_edges([1, 2], [])
    assert incoming_count(g, {1: 2, 2: 1}, 1) == 0


def test_incoming_unknown_vertex():
    with pytest.raises(InputError):
        incoming_count(path3(), {1: 1, 2: 2, 3: 3}, 7)


def test_incoming_example_v9(example_graph, identity_sigma):
    g, _ = example_graph
    assert incoming_count(g, identity_sigma, 9) == 3


def test_deficiency_example_identity(example_graph, identity_sigma):
    g, thr = example_graph
    assert deficiency(g, thr, identity_sigma) == {1}


def test_deficiency_all_zero_thresholds(example_graph, identity_sigma):
    g, _ = example_graph
    zero = ThresholdMap.of({v: 0 for v in g.vertices})
    assert deficiency(g, zero, identity_sigma) == set()


@pytest.mark.parametrize("seq", [(1, 2), (2, 1)])
def test_deficiency_k2_first_vertex(seq):
    g = Graph.from_edges([1, 2], [(1, 2)])
    thr = ThresholdMap.of({1: 1, 2: 1})
    assert deficiency(g, thr, ordering_from_sequence(seq)) == {seq[0]}


def test_ordering_helpers():
    sigma = ordering_from_sequence([3, 1, 2])
    assert sigma == {3: 1, 1: 2, 2: 3}
    assert sequence_from_ordering(sigma) == [3, 1, 2]
    with pytest.raises(InputError):
        ordering_from_sequence([1, 1])
    with pytest.raises(InputError):
        check_ordering(path3(), {1: 1, 2: 2})


@st.composite
def graph_thr_sigma(draw):
    n = draw(st.integers(1, 7))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    edges = [p for p in pairs if draw(st.booleans())]
    g = Graph.from_edges(range(1, n + 1), edges)
    thr = {v: draw(st.integers(0, 3)) for v in g.vertices}
    perm = draw(st.permutations(list(g.vertices)))
    return g, thr, ordering_from_sequence(perm)


@settings(max_examples=100, deadline=None)
@given(graph_thr_sigma())
def test_incoming_sums_to_edge_count(data):
    g, _, sigma = data
    assert sum(incoming_count(g, sigma, v) for v in g.vertices) == g.m


@settings(max_examples=100, deadline=None)
@given(graph_thr_sigma(), st.data())
def test_deficiency_monotone_in_thresholds(data, extra):
    g, thr, sigma = data
    v = extra.draw(st.sampled_from(g.vertices))
    raised = dict(thr)
    raised[v] += 1
    assert deficiency(g, ThresholdMap.of(thr), sigma) <= deficiency(g, ThresholdMap.of(raised), sigma)
