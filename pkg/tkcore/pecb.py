"""
The PECB index: ECB-Forests of all start times, change-compressed.

Every forest node stores its ``(start_time, left, right, parent)`` entries in
decreasing start time order, written only when they differ from the entry
of the next start time.  The neighbors of a node at start time ``ts`` are
those of the entry with the smallest start time ``>= ts``.  Every vertex
stores its entry point, the lowest-ranked forest node incident to it, the
same way.
"""
import bisect
import time
from dataclasses import dataclass, field

import numpy as np
from astropy.table import Table

from tkcore import log
from tkcore.binary import read_sections, write_sections
from tkcore.coretime import all_edge_core_times
from tkcore.exceptions import IndexFormatError
from tkcore.forest import LiveForestState, find_insertion, insert_node
from tkcore.graph import _check_k, check_window
from tkcore.meta import TemporalIndexABC
from tkcore.query import check_query, forest_search

__all__ = ['PECBIndex', 'ForestSnapshot', 'IndexStats', 'build', 'neighbors_at',
           'entry_node_at', 'snapshot_forest', 'serialize', 'deserialize', 'stats']

MAGIC = b"PECB"
NONE = -1

UNKNOWN_NODE_ERROR = "Unknown forest node {0}; the index has {1} nodes."
UNKNOWN_VERTEX_ERROR = "Unknown vertex {0}; the index covers vertices [0, {1})."


def _optional(value):
    return None if value == NONE else value


class PECBIndex(TemporalIndexABC):
    """
    Versioned edge-centric binary forest index for one ``k``.

    Instances are produced by `build` or `deserialize` and never change
    afterwards, so they can be queried from many threads at once.

    Parameters
    ----------
    k, n, t_max: `int`
    arrays: `dict` of `numpy.ndarray`
        The index sections, keyed as in `SECTIONS`.
    build_info: `dict`, optional
        Counters collected while building; not serialized.
    """

    #: Section names in file order with their dtypes.
    SECTIONS = (
        ("node_edge", "<i4"), ("node_u", "<i4"), ("node_v", "<i4"), ("node_core", "<i4"),
        ("entry_offsets", "<i4"), ("entry_start", "<i4"), ("entry_left", "<i4"),
        ("entry_right", "<i4"), ("entry_parent", "<i4"),
        ("point_offsets", "<i4"), ("point_start", "<i4"), ("point_node", "<i4"),
        ("created", "<i4"), ("deleted", "<i4"),
        ("labels", "<i8"), ("times", "<i8"),
    )

    def __init__(self, k, n, t_max, arrays, build_info=None):
        self._k = int(k)
        self._n = int(n)
        self._t_max = int(t_max)
        self.arrays = {name: np.asarray(arrays[name]) for name, _ in self.SECTIONS}
        for array in self.arrays.values():
            array.setflags(write=False)
        self.build_info = dict(build_info or {})
        a = self.arrays
        # Python lists make the per-node binary searches of a query cheap.
        self._entry_offsets = a["entry_offsets"].tolist()
        self._neg_entry_start = (-a["entry_start"].astype(np.int64)).tolist()
        self._entry_left = a["entry_left"].tolist()
        self._entry_right = a["entry_right"].tolist()
        self._entry_parent = a["entry_parent"].tolist()
        self._point_offsets = a["point_offsets"].tolist()
        self._neg_point_start = (-a["point_start"].astype(np.int64)).tolist()
        self._point_node = a["point_node"].tolist()
        self._core = a["node_core"].tolist()
        self._node_u = a["node_u"].tolist()
        self._node_v = a["node_v"].tolist()
        self._created = a["created"].tolist()
        self._deleted = a["deleted"].tolist()
        self._edge_versions = None

    def __eq__(self, other):
        if not isinstance(other, PECBIndex):
            return NotImplemented
        return ((self._k, self._n, self._t_max) == (other._k, other._n, other._t_max) and
                all(np.array_equal(self.arrays[name], other.arrays[name])
                    for name, _ in self.SECTIONS))

    def __repr__(self):
        return (f"{self.__class__.__name__}(k={self.k}, n={self.n_vertices}, "
                f"t_max={self.t_max}, nodes={self.n_nodes}, "
                f"entries={len(self.arrays['entry_start'])})")

    kind = "pecb"

    @property
    def k(self):
        return self._k

    @property
    def n_vertices(self):
        return self._n

    @property
    def t_max(self):
        return self._t_max

    @property
    def labels(self):
        return self.arrays["labels"]

    @property
    def times(self):
        return self.arrays["times"]

    @property
    def n_nodes(self):
        return len(self._core)

    def core_time(self, node_id):
        return self._core[node_id]

    def endpoints(self, node_id):
        return self._node_u[node_id], self._node_v[node_id]

    def edge_id(self, node_id):
        return int(self.arrays["node_edge"][node_id])

    @property
    def edge_versions(self):
        """Edge id to the ids of its forest node versions, in creation order."""
        if self._edge_versions is None:
            versions = {}
            for node_id, edge_id in enumerate(self.arrays["node_edge"].tolist()):
                versions.setdefault(edge_id, []).append(node_id)
            self._edge_versions = versions
        return self._edge_versions

    def entries(self, node_id):
        """All ``(start_time, left, right, parent)`` entries of a node."""
        self._check_node(node_id)
        lo, hi = self._entry_offsets[node_id], self._entry_offsets[node_id + 1]
        return [(-self._neg_entry_start[i], _optional(self._entry_left[i]),
                 _optional(self._entry_right[i]), _optional(self._entry_parent[i]))
                for i in range(lo, hi)]

    def is_live(self, node_id, ts):
        return self._created[node_id] >= ts > self._deleted[node_id]

    def _check_node(self, node_id):
        if not 0 <= node_id < self.n_nodes:
            raise ValueError(UNKNOWN_NODE_ERROR.format(node_id, self.n_nodes))

    def _entry_index(self, node_id, ts):
        lo, hi = self._entry_offsets[node_id], self._entry_offsets[node_id + 1]
        i = bisect.bisect_right(self._neg_entry_start, -ts, lo, hi) - 1
        return i if i >= lo else None

    def neighbors_at(self, node_id, ts):
        """
        ``(parent, left, right)`` of a node in the forest of start time ``ts``.

        Returns `None` when the node has no entry at or after ``ts``.
        """
        self._check_node(node_id)
        check_window(self._t_max, ts, ts)
        return self._neighbors(node_id, ts)

    def _neighbors(self, node_id, ts):
        i = self._entry_index(node_id, ts)
        if i is None:
            return None
        return (_optional(self._entry_parent[i]), _optional(self._entry_left[i]),
                _optional(self._entry_right[i]))

    def entry_node_at(self, u, ts):
        """
        Lowest-ranked forest node incident to vertex ``u`` at start time ``ts``.
        """
        if not 0 <= u < self._n:
            raise ValueError(UNKNOWN_VERTEX_ERROR.format(u, self._n))
        check_window(self._t_max, ts, ts)
        lo, hi = self._point_offsets[u], self._point_offsets[u + 1]
        i = bisect.bisect_right(self._neg_point_start, -ts, lo, hi) - 1
        if i < lo:
            return None
        return _optional(self._point_node[i])

    def search(self, u, ts, te):
        u, ts, te = check_query(self, (u, ts, te))
        return forest_search(self, u, ts, te)

    def snapshot_forest(self, ts):
        return snapshot_forest(self, ts)

    def stats(self):
        return stats(self)

    def serialize(self, sink):
        serialize(self, sink)


@dataclass
class ForestSnapshot:
    """
    The explicit ECB-Forest of one start time.

    ``parent``, ``left`` and ``right`` map every live node id to a node id or
    `None`.
    """
    ts: int
    parent: dict = field(default_factory=dict)
    left: dict = field(default_factory=dict)
    right: dict = field(default_factory=dict)

    @property
    def nodes(self):
        return sorted(self.parent)

    @property
    def roots(self):
        return sorted(node for node, parent in self.parent.items() if parent is None)

    def children(self, node):
        return [c for c in (self.left[node], self.right[node]) if c is not None]

    def depth(self):
        """Largest number of links between any node and its root."""
        depth = 0
        frontier = [(root, 0) for root in self.roots]
        while frontier:
            node, d = frontier.pop()
            depth = max(depth, d)
            frontier.extend((child, d + 1) for child in self.children(node))
        return depth


@dataclass
class IndexStats:
    """
    Size and shape measurements of a built index.

    The ``*_per_ts`` arrays are indexed by start time; element 0 is unused.
    """
    n_nodes: int
    n_forest_nodes: int
    total_entries: int
    mean_entries_per_node: float
    entry_point_records: int
    nbytes: int
    insertions_per_ts: np.ndarray
    deletions_per_ts: np.ndarray
    live_nodes_per_ts: np.ndarray
    depth_per_ts: np.ndarray

    def summary(self):
        return {"nodes": self.n_nodes, "forest_nodes": self.n_forest_nodes,
                "entries": self.total_entries,
                "mean_entries_per_node": self.mean_entries_per_node,
                "entry_point_records": self.entry_point_records, "bytes": self.nbytes}

    def to_table(self):
        """Per start time counts as an `astropy.table.Table`."""
        ts = np.arange(1, len(self.insertions_per_ts))
        return Table([ts, self.insertions_per_ts[1:], self.deletions_per_ts[1:],
                      self.live_nodes_per_ts[1:], self.depth_per_ts[1:]],
                     names=("ts", "inserted", "deleted", "live_nodes", "depth"))


def build(g, k, table=None):
    """
    Build the PECB index of ``g`` for ``k``.

    Start times are processed from ``t_max`` down to 1.  At each start time
    the edges whose core time differs from the next start time get a new
    forest node, inserted in ascending rank order; afterwards one entry is
    written per changed node and one entry point per changed vertex.

    Parameters
    ----------
    g: `tkcore.graph.TemporalGraph`
        Graph with positive timestamps.
    k: `int`
    table: `tkcore.coretime.CoreTimeTable`, optional
        Precomputed edge core times for the same ``g`` and ``k``.

    Returns
    -------
    index: `PECBIndex`
    """
    k = _check_k(k)
    if g.m and g.t_min < 1:
        raise ValueError("Timestamps must be positive; normalize the graph first.")
    start = time.perf_counter()
    if table is None:
        table = all_edge_core_times(g, k)
    t_max = g.t_max
    batches = {}
    for edge_id, core_time, lst in table.versions():
        batches.setdefault(lst, []).append((core_time, edge_id))

    state = LiveForestState(g.n)
    entries = []
    points = [[] for _ in range(g.n)]
    counters = {"insertions": 0, "skipped": 0, "deletions": 0, "entry_writes": 0,
                "point_writes": 0, "sweeps": table.sweeps}
    edge_u = g.u.tolist()
    edge_v = g.v.tolist()
    for ts in range(t_max, 0, -1):
        state.ts = ts
        batch = sorted(batches.get(ts, ()))
        inserted = removed = 0
        for core_time, edge_id in batch:
            node = state.add_node(edge_id, edge_u[edge_id], edge_v[edge_id], core_time)
            entries.append([])
            anchors = find_insertion(node, state)
            if anchors.convergent:
                counters["skipped"] += 1
                continue
            inserted += 1
            if insert_node(node, anchors, state) is not None:
                removed += 1
        nodes, vertices = state.take_flush()
        for node_id in nodes:
            parent, left, right = state.neighbors(node_id)
            entry = (ts, left, right, parent)
            if not entries[node_id] or entries[node_id][-1][1:] != entry[1:]:
                entries[node_id].append(entry)
                counters["entry_writes"] += 1
        for vertex in vertices:
            node_id = state.lowest_incident(vertex)
            last = points[vertex][-1][1] if points[vertex] else None
            if node_id != last:
                points[vertex].append((ts, node_id))
                counters["point_writes"] += 1
        counters["insertions"] += inserted
        counters["deletions"] += removed
        if batch:
            log.debug(f"ts={ts}: {len(batch)} new versions, {inserted} inserted, "
                      f"{removed} removed, {len(state.live)} live")

    index = PECBIndex(k, g.n, t_max, _pack(state, entries, points, g.labels, g.time_axis),
                      build_info=counters)
    index.build_info["seconds"] = time.perf_counter() - start
    log.info(f"Built PECB index for k={k}: {index.n_nodes} nodes, "
             f"{counters['entry_writes']} entries in {index.build_info['seconds']:.3f} s")
    return index


def _csr(lists):
    offsets = np.zeros(len(lists) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(items) for items in lists])
    return offsets


def _none_to_minus_one(values):
    return np.array([NONE if value is None else value for value in values], dtype=np.int64)


def _pack(state, entries, points, labels, times):
    flat_entries = [entry for node_entries in entries for entry in node_entries]
    flat_points = [point for vertex_points in points for point in vertex_points]
    nodes = state.nodes
    return {
        "node_edge": np.array([node.edge_id for node in nodes], dtype=np.int64),
        "node_u": np.array([node.u for node in nodes], dtype=np.int64),
        "node_v": np.array([node.v for node in nodes], dtype=np.int64),
        "node_core": np.array([node.core_time for node in nodes], dtype=np.int64),
        "entry_offsets": _csr(entries),
        "entry_start": np.array([e[0] for e in flat_entries], dtype=np.int64),
        "entry_left": _none_to_minus_one(e[1] for e in flat_entries),
        "entry_right": _none_to_minus_one(e[2] for e in flat_entries),
        "entry_parent": _none_to_minus_one(e[3] for e in flat_entries),
        "point_offsets": _csr(points),
        "point_start": np.array([p[0] for p in flat_points], dtype=np.int64),
        "point_node": _none_to_minus_one(p[1] for p in flat_points),
        "created": np.array([node.created_ts or 0 for node in nodes], dtype=np.int64),
        "deleted": np.array([node.deleted_ts or 0 for node in nodes], dtype=np.int64),
        "labels": np.asarray(labels, dtype=np.int64),
        "times": np.asarray(times, dtype=np.int64),
    }


def neighbors_at(idx, node_id, ts):
    """
    ``(parent, left, right)`` of a node at start time ``ts``, each optional.
    """
    return idx.neighbors_at(node_id, ts)


def entry_node_at(idx, u, ts):
    """
    The entry point of vertex ``u`` at start time ``ts``, or `None`.
    """
    return idx.entry_node_at(u, ts)


def snapshot_forest(idx, ts):
    """
    Decode the ECB-Forest of start time ``ts``.

    Returns
    -------
    snapshot: `ForestSnapshot`
    """
    check_window(idx.t_max, ts, ts)
    snapshot = ForestSnapshot(ts)
    for node_id in range(idx.n_nodes):
        if not idx.is_live(node_id, ts):
            continue
        parent, left, right = idx._neighbors(node_id, ts)
        snapshot.parent[node_id] = parent
        snapshot.left[node_id] = left
        snapshot.right[node_id] = right
    return snapshot


def stats(idx):
    """
    Measure a built `PECBIndex`.

    Returns
    -------
    stats: `IndexStats`
    """
    a = idx.arrays
    t_max = idx.t_max
    created = a["created"]
    deleted = a["deleted"]
    n_entries = len(a["entry_start"])
    ever_live = int(np.count_nonzero(created))
    insertions = np.bincount(created[created > 0], minlength=t_max + 1)[:t_max + 1]
    deletions = np.bincount(deleted[deleted > 0], minlength=t_max + 1)[:t_max + 1]
    live = np.zeros(t_max + 1, dtype=np.int64)
    depth = np.zeros(t_max + 1, dtype=np.int64)
    for ts in range(1, t_max + 1):
        snapshot = snapshot_forest(idx, ts)
        live[ts] = len(snapshot.parent)
        depth[ts] = snapshot.depth()
    return IndexStats(
        n_nodes=idx.n_nodes, n_forest_nodes=ever_live, total_entries=n_entries,
        mean_entries_per_node=n_entries / ever_live if ever_live else 0.0,
        entry_point_records=len(a["point_start"]), nbytes=idx.nbytes,
        insertions_per_ts=insertions, deletions_per_ts=deletions,
        live_nodes_per_ts=live, depth_per_ts=depth)


def serialize(idx, sink):
    """
    Write a `PECBIndex` to a path or binary file object.
    """
    a = idx.arrays
    header = (idx.k, idx.n_vertices, idx.t_max, idx.n_nodes, len(a["entry_start"]),
              len(a["point_start"]))
    write_sections(sink, MAGIC, header,
                   [(dtype, a[name]) for name, dtype in PECBIndex.SECTIONS])


def _layout(header):
    _, n, t_max, n_nodes, n_entries, n_points = header
    lengths = {"entry_offsets": n_nodes + 1, "entry_start": n_entries,
               "entry_left": n_entries, "entry_right": n_entries, "entry_parent": n_entries,
               "point_offsets": n + 1, "point_start": n_points, "point_node": n_points,
               "labels": n, "times": t_max}
    return [(name, dtype, lengths.get(name, n_nodes)) for name, dtype in PECBIndex.SECTIONS]


def deserialize(source):
    """
    Read a `PECBIndex` written by `serialize`.

    Raises
    ------
    tkcore.exceptions.IndexFormatError
        If the file is not a PECB index of a supported version, is truncated,
        or has inconsistent sections.
    """
    header, arrays = read_sections(source, MAGIC, "PECB", 6, _layout)
    k, n, t_max, n_nodes, n_entries, n_points = header
    for name, total in (("entry_offsets", n_entries), ("point_offsets", n_points)):
        offsets = arrays[name]
        if offsets[0] != 0 or offsets[-1] != total or np.any(np.diff(offsets) < 0):
            raise IndexFormatError(f"Section {name!r} is inconsistent with the header.")
    return PECBIndex(k, n, t_max, arrays)
