import io

import numpy as np
import pytest

from tkcore.coretime import all_edge_core_times
from tkcore.ctmsf import UnionFind, kruskal_forest
from tkcore.exceptions import IndexFormatError
from tkcore.graph import compress_timestamps, connected_components
from tkcore.oracle import temporal_k_core
from tkcore.pecb import (PECBIndex, build, deserialize, entry_node_at, neighbors_at, serialize,
                         snapshot_forest, stats)

# Example forest nodes as (u label, v label, core time).
EXAMPLE_NODES = {
    "e1": (1, 2, 4), "e2": (1, 3, 4), "e3": (2, 3, 4), "e4": (3, 8, 5),
    "e5": (6, 7, 5), "e6": (6, 8, 5), "e7": (7, 8, 5), "e8": (4, 5, 6),
    "e9": (2, 4, 6), "e10": (2, 5, 6), "e11": (2, 5, 7), "e12": (5, 6, 7),
}
# Versioned entries (start time, left, right, parent) of every example node.
EXAMPLE_ENTRIES = {
    "e1": [(4, None, None, "e2")],
    "e2": [(4, "e1", None, "e11"), (3, "e1", None, "e9"), (2, "e1", None, "e4")],
    "e3": [],
    "e4": [(2, "e2", None, "e6")],
    "e5": [(4, None, None, "e6")],
    "e6": [(4, "e5", None, "e12"), (2, "e5", "e4", "e9")],
    "e7": [],
    "e8": [(3, None, None, "e9")],
    "e9": [(3, "e2", "e8", "e12"), (2, "e6", "e8", None)],
    "e10": [],
    "e11": [(4, "e2", None, "e12")],
    "e12": [(4, "e11", "e6", None), (3, "e9", "e6", None)],
}


@pytest.fixture(scope="module")
def example_index(example_graph):
    return build(example_graph, 2)


@pytest.fixture(scope="module")
def names(example_index):
    """Example node name to node id."""
    by_key = {}
    for node_id in range(example_index.n_nodes):
        u, v = example_index.endpoints(node_id)
        key = (int(example_index.labels[u]), int(example_index.labels[v]),
               example_index.core_time(node_id))
        by_key[key] = node_id
    return {name: by_key[key] for name, key in EXAMPLE_NODES.items()}


def rank(idx, node_id):
    return idx.core_time(node_id), idx.edge_id(node_id)


def assert_forest_invariants(idx, g, table, ts):
    snapshot = snapshot_forest(idx, ts)
    nodes = set(snapshot.nodes)
    # Binary shape and consistent links.
    for node in nodes:
        children = snapshot.children(node)
        assert len(children) <= 2
        for child in children:
            assert child in nodes
            assert snapshot.parent[child] == node
            assert rank(idx, child) < rank(idx, node)
        parent = snapshot.parent[node]
        if parent is not None:
            assert node in snapshot.children(parent)
    # Every node reaches a root, so there are no cycles.
    for node in nodes:
        seen = set()
        while node is not None:
            assert node not in seen
            seen.add(node)
            node = snapshot.parent[node]
    # The node set is the Kruskal CT-MSF.
    expected = kruskal_forest(g, table, ts)
    assert sorted(rank(idx, node) for node in nodes) == sorted(expected)
    # Slices by core time span the temporal k-core and are connected subtrees.
    for te in range(ts, g.t_max + 1):
        sliced = {node for node in nodes if idx.core_time(node) <= te}
        sets = UnionFind(g.n)
        for node in sliced:
            u, v = idx.endpoints(node)
            assert not sets.connected(u, v)
            sets.union(u, v)
        core = temporal_k_core(g, idx.k, (ts, te))
        touched = {w for node in sliced for w in idx.endpoints(node)}
        assert touched == set(core.vertices)
        for component in connected_components(core):
            roots = {sets.find(w) for w in component}
            assert len(roots) == 1
            members = {node for node in sliced if idx.endpoints(node)[0] in component}
            tops = [node for node in members if snapshot.parent[node] not in members]
            assert len(tops) == 1


def assert_child_maximality(idx, ts):
    snapshot = snapshot_forest(idx, ts)
    nodes = snapshot.nodes
    for x in nodes:
        lower = [node for node in nodes if rank(idx, node) < rank(idx, x)]
        sets = UnionFind(idx.n_vertices)
        for node in lower:
            sets.union(*idx.endpoints(node))
        for endpoint, child in zip(idx.endpoints(x), (snapshot.left[x], snapshot.right[x])):
            connected = [node for node in lower
                         if sets.connected(idx.endpoints(node)[0], endpoint)]
            best = max(connected, key=lambda node: rank(idx, node)) if connected else None
            assert child == best


def test_example_census(example_index, names):
    assert example_index.n_nodes == 12
    cores = sorted(example_index.core_time(node) for node in range(12))
    assert cores == [4, 4, 4, 5, 5, 5, 5, 6, 6, 6, 7, 7]
    for name in ("e3", "e7", "e10"):
        assert example_index.entries(names[name]) == []
        assert not any(example_index.is_live(names[name], ts) for ts in range(1, 8))


def test_example_entries(example_index, names):
    for name, expected in EXAMPLE_ENTRIES.items():
        expected = [(ts, names.get(left), names.get(right), names.get(parent))
                    for ts, left, right, parent in expected]
        assert example_index.entries(names[name]) == expected, name


def test_example_snapshots(example_index, names):
    b3 = snapshot_forest(example_index, 3)
    assert b3.nodes == sorted(names[n] for n in ("e1", "e2", "e5", "e6", "e8", "e9", "e12"))
    assert b3.roots == [names["e12"]]
    b2 = snapshot_forest(example_index, 2)
    assert b2.roots == [names["e9"]]
    assert (b2.left[names["e9"]], b2.right[names["e9"]]) == (names["e6"], names["e8"])
    assert (b2.left[names["e6"]], b2.right[names["e6"]]) == (names["e5"], names["e4"])
    assert b2.left[names["e4"]] == names["e2"]
    assert b2.left[names["e2"]] == names["e1"]
    assert snapshot_forest(example_index, 5).nodes == []


def test_neighbors_at(example_index, names):
    assert neighbors_at(example_index, names["e6"], 3) == (names["e12"], names["e5"], None)
    assert neighbors_at(example_index, names["e1"], 5) is None
    assert neighbors_at(example_index, names["e9"], 2) == (None, names["e6"], names["e8"])
    with pytest.raises(ValueError):
        neighbors_at(example_index, 12, 3)
    with pytest.raises(ValueError):
        neighbors_at(example_index, 0, 8)


def test_entry_node_at(example_index, names):
    v2, v8 = 1, 7
    assert entry_node_at(example_index, v2, 3) == names["e1"]
    assert entry_node_at(example_index, v8, 3) == names["e6"]
    assert entry_node_at(example_index, v8, 2) == names["e4"]
    assert entry_node_at(example_index, v2, 5) is None
    with pytest.raises(ValueError):
        entry_node_at(example_index, 8, 3)


def test_edge_versions(example_index, names):
    assert example_index.edge_versions[9] == [names["e11"], names["e10"]]
    assert len(example_index.edge_versions) == 11


@pytest.mark.parametrize("ts", range(1, 8))
def test_example_invariants(example_graph, example_index, ts):
    table = all_edge_core_times(example_graph, 2)
    assert_forest_invariants(example_index, example_graph, table, ts)
    assert_child_maximality(example_index, ts)


def test_entries_are_compressed(example_index):
    for node in range(example_index.n_nodes):
        entries = example_index.entries(node)
        assert [e[0] for e in entries] == sorted({e[0] for e in entries}, reverse=True)
        for newer, older in zip(entries, entries[1:]):
            assert newer[1:] != older[1:]


def replay_snapshots(idx):
    """Apply each start time's entries to the forest of the next one."""
    deleted = idx.arrays["deleted"].tolist()
    changes = {}
    for node in range(idx.n_nodes):
        for start, left, right, parent in idx.entries(node):
            changes.setdefault(start, []).append((node, (parent, left, right)))
    current = {}
    for ts in range(idx.t_max, 0, -1):
        current = {node: links for node, links in current.items() if deleted[node] != ts}
        current.update(changes.get(ts, ()))
        yield ts, dict(current)


def snapshot_links(snapshot):
    return {node: (snapshot.parent[node], snapshot.left[node], snapshot.right[node])
            for node in snapshot.nodes}


def test_entries_replay_example(example_index):
    for ts, links in replay_snapshots(example_index):
        assert links == snapshot_links(snapshot_forest(example_index, ts))


@pytest.mark.parametrize("seed", range(4))
def test_entries_replay_random(make_random_graph, seed):
    g = make_random_graph(15, 90, 12, seed=300 + seed)
    for k in (1, 2, 3):
        idx = build(g, k)
        for ts, links in replay_snapshots(idx):
            assert links == snapshot_links(snapshot_forest(idx, ts))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("k", [2, 3])
def test_random_invariants(make_random_graph, seed, k):
    g = make_random_graph(14, 70, 12, seed=seed)
    table = all_edge_core_times(g, k)
    idx = build(g, k, table)
    for ts in range(1, g.t_max + 1):
        assert_forest_invariants(idx, g, table, ts)
        assert_child_maximality(idx, ts)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_random_invariants_larger(make_random_graph, seed):
    g = make_random_graph(40, 400, 30, seed=1000 + seed)
    for k in (2, 3, 5):
        table = all_edge_core_times(g, k)
        idx = build(g, k, table)
        for ts in range(1, g.t_max + 1):
            assert_forest_invariants(idx, g, table, ts)


def test_k_above_kmax(example_graph):
    idx = build(example_graph, 3)
    assert idx.n_nodes == 0
    assert all(idx.query(u, 1, 7) == () for u in range(8))
    summary = stats(idx).summary()
    assert summary["nodes"] == 0 and summary["entries"] == 0


def test_stats(example_index):
    s = stats(example_index)
    assert s.n_nodes == 12
    assert s.n_forest_nodes == 9
    assert s.total_entries == 14
    assert s.mean_entries_per_node == pytest.approx(14 / 9)
    assert s.nbytes == example_index.nbytes
    assert list(s.insertions_per_ts[1:]) == [0, 1, 2, 6, 0, 0, 0]
    assert list(s.deletions_per_ts[1:]) == [0, 1, 1, 0, 0, 0, 0]
    assert list(s.live_nodes_per_ts[1:]) == [7, 7, 7, 6, 0, 0, 0]
    assert s.depth_per_ts[3] == 3
    assert np.all(s.deletions_per_ts <= s.insertions_per_ts)
    table = s.to_table()
    assert table.colnames == ["ts", "inserted", "deleted", "live_nodes", "depth"]
    assert len(table) == 7


def test_build_info_counts_entries(make_random_graph):
    g = make_random_graph(20, 120, 15, seed=21)
    idx = build(g, 2)
    assert idx.build_info["entry_writes"] == stats(idx).total_entries
    assert idx.build_info["point_writes"] == stats(idx).entry_point_records


def test_live_node_bound(make_random_graph):
    g = make_random_graph(20, 120, 15, seed=22)
    idx = build(g, 2)
    s = stats(idx)
    for ts in range(1, g.t_max + 1):
        core = temporal_k_core(g, 2, (ts, g.t_max))
        assert s.live_nodes_per_ts[ts] <= len(core) - len(connected_components(core))


def test_build_rejects_bad_k(example_graph):
    with pytest.raises(ValueError):
        build(example_graph, 0)


def test_round_trip(example_index, tmp_path):
    path = tmp_path / "example.pecb"
    serialize(example_index, path)
    loaded = deserialize(path)
    assert loaded == example_index
    assert loaded.query(1, 3, 5) == (0, 1, 2)
    np.testing.assert_array_equal(loaded.labels, np.arange(1, 9))


def test_times_section(example_graph, example_index):
    np.testing.assert_array_equal(example_index.times, np.arange(1, 8))
    idx = build(compress_timestamps(example_graph), 2)
    np.testing.assert_array_equal(idx.times, [2, 3, 4, 5, 6, 7])
    assert deserialize(io.BytesIO(serialized(idx))) == idx
    assert idx.query(1, 2, 4) == example_index.query(1, 3, 5)


def test_round_trip_random(make_random_graph):
    g = make_random_graph(200, 10_000, 40, seed=8)
    idx = build(g, 3)
    buffer = io.BytesIO()
    idx.serialize(buffer)
    buffer.seek(0)
    assert deserialize(buffer) == idx


def serialized(idx):
    buffer = io.BytesIO()
    idx.serialize(buffer)
    return buffer.getvalue()


@pytest.mark.parametrize("corrupt", [
    lambda data: b"XXXX" + data[4:],
    lambda data: data[:4] + b"\x09" + data[5:],
    lambda data: data[:10],
    lambda data: data[:-3],
    lambda data: data + b"\x00\x00\x00\x00",
])
def test_corrupt_file_rejected(example_index, corrupt):
    with pytest.raises(IndexFormatError):
        deserialize(io.BytesIO(corrupt(serialized(example_index))))


def test_isinstance_abc(example_index):
    from tkcore.meta import TemporalIndexABC

    assert isinstance(example_index, TemporalIndexABC)
    assert example_index.kind == "pecb"
    assert isinstance(example_index, PECBIndex)
