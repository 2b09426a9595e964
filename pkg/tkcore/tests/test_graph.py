import networkx as nx
import numpy as np
import pytest

from tkcore.exceptions import EdgeListParseError, TkcoreUserWarning
from tkcore.graph import (StaticGraph, TemporalGraph, TimeWindow, aggregate_days, axis_window,
                          check_window, compress_timestamps, connected_components,
                          core_numbers, load_edge_list, normalize_timestamps, peel_k_core,
                          project)

SECONDS_PER_DAY = 86400
# Dense ids of the example graph's vertices v1..v8.
V1, V2, V3, V4, V5, V6, V7, V8 = range(8)


def test_load_example_graph(example_graph):
    assert example_graph.n == 8
    assert example_graph.m == 11
    assert example_graph.t_max == 7
    assert example_graph.t_min == 2
    np.testing.assert_array_equal(example_graph.labels, np.arange(1, 9))
    assert example_graph.edge(0) == (0, V3, V8, 2)
    assert example_graph.edge(9) == (9, V2, V5, 6)
    assert example_graph.meta.self_loops_dropped == 0
    assert example_graph.meta.source.endswith("example_graph.txt")


def test_edges_nondecreasing_in_time(example_graph):
    assert np.all(np.diff(example_graph.t) >= 0)
    assert all(e.u < e.v for e in example_graph.edges)


def test_per_vertex_is_symmetric(example_graph):
    for u, adjacency in enumerate(example_graph.per_vertex):
        for v, t, edge_id in adjacency:
            assert (u, t, edge_id) in example_graph.per_vertex[v]
    assert sum(len(a) for a in example_graph.per_vertex) == 2 * example_graph.m


def test_self_loop_dropped_with_warning():
    with pytest.warns(TkcoreUserWarning, match="1 self-loop"):
        g = load_edge_list(["0 0 5"])
    assert g.n == 1
    assert g.m == 0
    assert g.meta.self_loops_dropped == 1


def test_duplicates_kept_and_ordered_by_time():
    g = load_edge_list(["0 1 10", "0 1 10", "1 2 3"])
    assert g.m == 3
    np.testing.assert_array_equal(g.t, [3, 10, 10])
    assert g.edge(0) == (0, 1, 2, 3)
    assert g.edge(1) == g.edge(2)._replace(edge_id=1)


def test_relabel_keeps_original_labels():
    g = load_edge_list(["% konect style", "100 7 1", "7 42 2"])
    np.testing.assert_array_equal(g.labels, [7, 42, 100])
    assert g.edge(0) == (0, 0, 2, 1)
    assert g.vertex_of(42) == 1
    assert g.label_of(2) == 100
    with pytest.raises(ValueError):
        g.vertex_of(5)


@pytest.mark.parametrize("lines, line_number", [
    (["# comment", "0 1 2", "0 1"], 3),
    (["0 1 2 3"], 1),
    (["0 1 x"], 1),
    (["", "0 -1 2"], 2),
    (["0 1 2.5"], 1),
])
def test_malformed_line(lines, line_number):
    with pytest.raises(EdgeListParseError) as e:
        load_edge_list(lines)
    assert e.value.line_number == line_number
    assert str(e.value).startswith(f"line {line_number}:")


def test_empty_input():
    with pytest.raises(EdgeListParseError):
        load_edge_list(["# nothing here", "   "])


def test_load_from_path(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("1 2 5\n2 3 6\n")
    g = load_edge_list(path)
    assert (g.n, g.m, g.t_max) == (3, 2, 6)


@pytest.mark.parametrize("times, expected", [
    ([2, 3, 4, 5, 6, 7], [1, 2, 3, 4, 5, 6]),
    ([100, 100, 500], [1, 1, 2]),
])
def test_normalize_timestamps(times, expected):
    g = TemporalGraph(np.zeros(len(times)), np.ones(len(times)), times)
    normalized, mapping = normalize_timestamps(g)
    np.testing.assert_array_equal(normalized.t, expected)
    assert normalized.t_max == max(expected)
    assert mapping == dict(zip(times, expected))
    assert normalized.meta.timestamp_mapping == mapping


def test_normalize_example_graph(example_graph):
    normalized, mapping = normalize_timestamps(example_graph)
    assert normalized.t_max == 6
    assert mapping[2] == 1 and mapping[7] == 6
    np.testing.assert_array_equal(normalized.u, example_graph.u)


@pytest.mark.parametrize("times, expected", [
    ([0, SECONDS_PER_DAY - 1], [1, 1]),
    ([SECONDS_PER_DAY - 1, SECONDS_PER_DAY], [1, 2]),
])
def test_aggregate_days(times, expected):
    g = TemporalGraph([0, 1], [1, 2], times)
    np.testing.assert_array_equal(aggregate_days(g).t, expected)


def test_aggregate_days_milliseconds():
    g = TemporalGraph([0, 1], [1, 2], [1000 * SECONDS_PER_DAY - 1, 1000 * SECONDS_PER_DAY])
    np.testing.assert_array_equal(aggregate_days(g, epoch_seconds=False).t, [1, 2])


def test_aggregate_three_days():
    base = 1_600_000_000 - 1_600_000_000 % SECONDS_PER_DAY
    offsets = [0, 10, 500, SECONDS_PER_DAY, SECONDS_PER_DAY + 1, SECONDS_PER_DAY + 7,
               2 * SECONDS_PER_DAY, 2 * SECONDS_PER_DAY + 3, 2 * SECONDS_PER_DAY + 9,
               3 * SECONDS_PER_DAY - 1]
    g = TemporalGraph(np.arange(10), np.arange(1, 11), [base + o for o in offsets])
    days = aggregate_days(g)
    assert days.t_max == 3
    assert days.meta["aggregation"] == "day"


@pytest.mark.parametrize("src, dst, times", [
    ([0], [0], [1]),
    ([0], [1], [-1]),
    ([0, 1], [1], [1]),
])
def test_temporal_graph_rejects(src, dst, times):
    with pytest.raises(ValueError):
        TemporalGraph(src, dst, times)


def test_temporal_graph_str(example_graph):
    assert "Temporal edges: 11" in str(example_graph)
    assert "Time range: 2 to 7" in repr(example_graph)


def test_edge_range(example_graph):
    assert example_graph.edge_range(4, 5) == range(2, 8)
    assert example_graph.edge_range(1, 1) == range(0, 0)
    with pytest.raises(ValueError):
        example_graph.edge(11)


@pytest.mark.parametrize("ts, te", [(0, 1), (3, 2), (1, 8)])
def test_check_window_rejects(ts, te):
    with pytest.raises(ValueError):
        check_window(7, ts, te)


def test_check_window():
    w = check_window(7, 3, 5)
    assert w == TimeWindow(3, 5)
    assert 4 in w and 6 not in w


def test_project_example_graph(example_graph):
    s = project(example_graph, (4, 5))
    assert s.vertices == (V1, V2, V3, V6, V7, V8)
    assert s.n_edges == 6
    assert project(example_graph, (6, 6)).edge_pairs() == [(V2, V4), (V2, V5)]


def test_project_collapses_parallel_edges():
    g = load_edge_list(["0 1 1", "0 1 2", "1 0 3"])
    assert project(g, (1, 3)).n_edges == 1


def test_projection_monotone(example_graph):
    for ts in range(1, 8):
        for te in range(ts, 7):
            small = set(project(example_graph, (ts, te)).edge_pairs())
            assert small <= set(project(example_graph, (ts, te + 1)).edge_pairs())


def test_peel_example_graph(example_graph):
    core = peel_k_core(project(example_graph, (4, 5)), 2)
    assert core.vertices == (V1, V2, V3, V6, V7, V8)
    assert len(peel_k_core(project(example_graph, (5, 7)), 2)) == 0


def test_peel_k1_drops_only_isolated(example_graph):
    s = project(example_graph, (1, 7))
    core = peel_k_core(s, 1)
    assert core.vertices == s.vertices
    assert core.edge_pairs() == s.edge_pairs()


def test_peel_fixpoint(make_random_graph):
    g = make_random_graph(30, 120, 10, seed=3)
    s = project(g, (1, g.t_max))
    for k in (1, 2, 3, 4):
        core = peel_k_core(s, k)
        assert peel_k_core(core, k).edge_pairs() == core.edge_pairs()
        assert all(core.degree(u) >= k for u in core.vertices)


@pytest.mark.parametrize("k", [0, -1, 1.5])
def test_peel_rejects_k(example_graph, k):
    with pytest.raises(ValueError):
        peel_k_core(project(example_graph, (1, 7)), k)


def test_connected_components(example_graph):
    core = peel_k_core(project(example_graph, (4, 5)), 2)
    assert connected_components(core) == [(V1, V2, V3), (V6, V7, V8)]
    assert connected_components(StaticGraph()) == []
    full = peel_k_core(project(example_graph, (3, 7)), 2)
    assert connected_components(full) == [tuple(range(8))]


def test_core_numbers_clique():
    clique = StaticGraph.from_pairs((a, b) for a in range(5) for b in range(a + 1, 5))
    assert core_numbers(clique) == {u: 4 for u in range(5)}


def test_core_numbers_match_peeling(make_random_graph):
    g = make_random_graph(40, 200, 5, seed=11)
    s = project(g, (1, g.t_max))
    cores = core_numbers(s)
    for k in range(1, max(cores.values()) + 2):
        assert set(peel_k_core(s, k).vertices) == {u for u, c in cores.items() if c >= k}


def test_static_graphs_are_networkx(example_graph):
    s = project(example_graph, (4, 5))
    core = peel_k_core(s, 2)
    assert isinstance(s, nx.Graph)
    assert isinstance(core, StaticGraph)
    assert StaticGraph.from_pairs([(0, 0), (0, 1), (1, 0)]).edge_pairs() == [(0, 1)]


def test_compress_timestamps():
    times = [100_000_000, 100_000_000, 3_000_000_000, 100_000_500]
    g = TemporalGraph([0, 1, 0, 2], [1, 2, 2, 3], times)
    compressed = compress_timestamps(g)
    np.testing.assert_array_equal(compressed.t, [1, 1, 2, 3])
    np.testing.assert_array_equal(compressed.time_axis,
                                  [100_000_000, 100_000_500, 3_000_000_000])
    assert compressed.meta.timestamp_mapping[3_000_000_000] == 3


def test_time_axis_is_dropped_by_with_times():
    compressed = compress_timestamps(load_edge_list(["0 1 50", "1 2 70"]))
    np.testing.assert_array_equal(compressed.time_axis, [50, 70])
    np.testing.assert_array_equal(compressed.with_times([1, 1]).time_axis, [1])


def test_compress_rejects_zero():
    with pytest.raises(ValueError, match="--normalize"):
        compress_timestamps(load_edge_list(["0 1 0", "1 2 4"]))


@pytest.mark.parametrize("start, end, expected", [
    (50, 70, (1, 2)),
    (1, 50, (1, 1)),
    (51, 69, None),
    (60, 900, (2, 3)),
    (900, 900, (3, 3)),
])
def test_axis_window(start, end, expected):
    assert axis_window([50, 70, 900], start, end) == expected


@pytest.mark.parametrize("start, end", [(0, 5), (6, 5), (1, 901)])
def test_axis_window_rejects(start, end):
    with pytest.raises(ValueError):
        axis_window([50, 70, 900], start, end)
