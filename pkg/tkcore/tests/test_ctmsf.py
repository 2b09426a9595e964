import io

import pytest

from tkcore.coretime import all_edge_core_times
from tkcore.ctmsf import (CTMSFIndex, UnionFind, build_ctmsf, ctmsf_query, deserialize,
                          kruskal_forest)
from tkcore.exceptions import IndexFormatError
from tkcore.pecb import build, snapshot_forest
from tkcore.query import Query, query_with_stats

V1, V2, V3, V4, V5, V6, V7, V8 = range(8)


@pytest.fixture(scope="module")
def example_table(example_graph):
    return all_edge_core_times(example_graph, 2)


@pytest.fixture(scope="module")
def example_index(example_graph, example_table):
    return build_ctmsf(example_graph, 2, example_table)


def test_union_find():
    sets = UnionFind(5)
    assert not sets.connected(0, 4)
    sets.union(0, 1)
    sets.union(3, 4)
    sets.union(1, 4)
    assert sets.connected(0, 3)
    assert not sets.connected(2, 3)
    assert len({sets.find(i) for i in range(5)}) == 2


def test_kruskal_forest_example(example_graph, example_table):
    expected = [(4, 2), (4, 3), (5, 5), (5, 6), (6, 1), (6, 8), (7, 10)]
    assert kruskal_forest(example_graph, example_table, 3) == expected
    assert kruskal_forest(example_graph, example_table, 5) == []


def test_kruskal_forest_k1(example_graph):
    table = all_edge_core_times(example_graph, 1)
    expected = [(2, 0), (3, 1), (4, 2), (4, 3), (4, 5), (5, 6), (6, 8)]
    assert kruskal_forest(example_graph, table, 1) == expected


def test_kruskal_forest_rejects_start(example_graph, example_table):
    with pytest.raises(ValueError):
        kruskal_forest(example_graph, example_table, 0)


@pytest.mark.parametrize("q, expected", [
    (Query(V2, 3, 5), (V1, V2, V3)),
    (Query(V4, 4, 5), ()),
    (Query(V8, 2, 5), (V1, V2, V3, V6, V7, V8)),
    (Query(V5, 3, 7), tuple(range(8))),
])
def test_ctmsf_query(example_index, q, expected):
    assert ctmsf_query(example_index, q) == expected


def test_query_stats(example_index):
    result, stats = query_with_stats(example_index, (V2, 3, 5))
    assert result == (V1, V2, V3)
    assert stats.nodes_visited == 3
    assert stats.binary_searches == 4


def test_incident_at(example_index):
    assert example_index.incident_at(V2, 3) == [(2, V1, 4), (8, V4, 6)]
    assert example_index.incident_at(V4, 5) == []
    with pytest.raises(ValueError):
        example_index.incident_at(8, 3)


def test_msf_edges_match_forest(example_graph, example_index):
    forest = build(example_graph, 2)
    for ts in range(1, example_graph.t_max + 1):
        expected = sorted(forest.edge_id(node) for node in snapshot_forest(forest, ts).nodes)
        assert example_index.msf_edges_at(ts) == expected


@pytest.mark.parametrize("seed", range(3))
def test_msf_edges_random(make_random_graph, seed):
    g = make_random_graph(20, 150, 12, seed=200 + seed)
    table = all_edge_core_times(g, 2)
    idx = build_ctmsf(g, 2, table)
    for ts in range(1, g.t_max + 1):
        expected = sorted(edge_id for _, edge_id in kruskal_forest(g, table, ts))
        assert idx.msf_edges_at(ts) == expected


def test_records_are_change_compressed(example_graph, example_index):
    assert example_index.build_info["records"] == len(example_index.arrays["record_start"])
    for u in range(example_graph.n):
        previous = []
        for ts in range(example_graph.t_max, 0, -1):
            current = example_index.incident_at(u, ts)
            if current != previous:
                starts = example_index.arrays["record_start"]
                assert ts in starts.tolist()
            previous = current


def test_round_trip(example_index, tmp_path):
    path = tmp_path / "example.ctmsf"
    example_index.serialize(path)
    loaded = deserialize(path)
    assert loaded == example_index
    assert isinstance(loaded, CTMSFIndex)
    assert loaded.kind == "ctmsf"
    assert loaded.query(V2, 3, 5) == (V1, V2, V3)


def test_wrong_kind_rejected(example_graph, example_index):
    buffer = io.BytesIO()
    build(example_graph, 2).serialize(buffer)
    buffer.seek(0)
    with pytest.raises(IndexFormatError):
        deserialize(buffer)


def test_truncated_rejected(example_index):
    buffer = io.BytesIO()
    example_index.serialize(buffer)
    with pytest.raises(IndexFormatError):
        deserialize(io.BytesIO(buffer.getvalue()[:-5]))
