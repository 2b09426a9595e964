"""
The vertex-centric baseline index.

For every start time the core-time minimum spanning forest (CT-MSF) is
computed from scratch with Kruskal's algorithm, and every vertex stores its
whole list of incident forest edges whenever that list differs from the one
of the next start time.
"""
import bisect
import time
from collections import deque

import numpy as np

from tkcore import log
from tkcore.binary import read_sections, write_sections
from tkcore.coretime import INFINITY, all_edge_core_times
from tkcore.exceptions import IndexFormatError
from tkcore.graph import _check_k, check_window
from tkcore.meta import TemporalIndexABC
from tkcore.query import check_query

__all__ = ['UnionFind', 'CTMSFIndex', 'kruskal_forest', 'build_ctmsf', 'ctmsf_query',
           'serialize', 'deserialize']

MAGIC = b"CMSF"


class UnionFind:
    """
    Disjoint sets over ``0 .. n - 1`` with path compression.
    """

    def __init__(self, n):
        self.forest = list(range(n))

    def union(self, a, b):
        root_a = self.find(a)
        root_b = self.find(b)
        self.forest[root_b] = root_a
        return root_a

    def find(self, k):
        # Find the root.
        root = k
        while root != self.forest[root]:
            root = self.forest[root]

        # Path compression.
        node = k
        while node != root:
            parent = self.forest[node]
            self.forest[node] = root
            node = parent

        return root

    def connected(self, a, b):
        return self.find(a) == self.find(b)


def _kruskal(n, edge_u, edge_v, edge_ids):
    """Kruskal over ``edge_ids`` already sorted by rank."""
    sets = UnionFind(n)
    chosen = []
    for edge_id in edge_ids:
        if not sets.connected(edge_u[edge_id], edge_v[edge_id]):
            sets.union(edge_u[edge_id], edge_v[edge_id])
            chosen.append(edge_id)
    return chosen


def _rank_order(core):
    finite = np.flatnonzero(core != INFINITY)
    return finite[np.lexsort((finite, core[finite]))].tolist()


def kruskal_forest(g, table, ts):
    """
    The CT-MSF of start time ``ts``.

    Edges are weighted by their core time at ``ts``, ties broken by edge id;
    edges with infinite core time are left out.

    Parameters
    ----------
    g: `tkcore.graph.TemporalGraph`
    table: `tkcore.coretime.CoreTimeTable`
    ts: `int`

    Returns
    -------
    edges: `list` of `tuple`
        ``(core_time, edge_id)`` of the forest edges in ascending rank.
    """
    check_window(g.t_max, ts, ts)
    core = np.array([table.core_time_at(edge_id, ts) for edge_id in range(g.m)],
                    dtype=np.int64)
    chosen = _kruskal(g.n, g.u.tolist(), g.v.tolist(), _rank_order(core))
    return [(int(core[edge_id]), edge_id) for edge_id in chosen]


class CTMSFIndex(TemporalIndexABC):
    """
    Change-compressed per-vertex CT-MSF adjacency lists for one ``k``.

    Parameters
    ----------
    k, n, t_max: `int`
    arrays: `dict` of `numpy.ndarray`
        The index sections, keyed as in `SECTIONS`.
    build_info: `dict`, optional
    """

    SECTIONS = (
        ("record_offsets", "<i4"), ("record_start", "<i4"), ("record_item", "<i4"),
        ("item_edge", "<i4"), ("item_other", "<i4"), ("item_core", "<i4"),
        ("labels", "<i8"), ("times", "<i8"),
    )

    kind = "ctmsf"

    def __init__(self, k, n, t_max, arrays, build_info=None):
        self._k = int(k)
        self._n = int(n)
        self._t_max = int(t_max)
        self.arrays = {name: np.asarray(arrays[name]) for name, _ in self.SECTIONS}
        for array in self.arrays.values():
            array.setflags(write=False)
        self.build_info = dict(build_info or {})
        a = self.arrays
        self._record_offsets = a["record_offsets"].tolist()
        self._neg_record_start = (-a["record_start"].astype(np.int64)).tolist()
        # record_item has one more entry than there are records.
        self._record_item = a["record_item"].tolist()
        self._item_other = a["item_other"].tolist()
        self._item_core = a["item_core"].tolist()

    def __eq__(self, other):
        if not isinstance(other, CTMSFIndex):
            return NotImplemented
        return ((self._k, self._n, self._t_max) == (other._k, other._n, other._t_max) and
                all(np.array_equal(self.arrays[name], other.arrays[name])
                    for name, _ in self.SECTIONS))

    def __repr__(self):
        return (f"{self.__class__.__name__}(k={self.k}, n={self.n_vertices}, "
                f"t_max={self.t_max}, records={len(self.arrays['record_start'])})")

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

    def _items(self, u, ts):
        lo, hi = self._record_offsets[u], self._record_offsets[u + 1]
        i = bisect.bisect_right(self._neg_record_start, -ts, lo, hi) - 1
        if i < lo:
            return range(0)
        return range(self._record_item[i], self._record_item[i + 1])

    def incident_at(self, u, ts):
        """
        CT-MSF edges at vertex ``u`` for start time ``ts``.

        Returns
        -------
        edges: `list` of `tuple`
            ``(edge_id, other_endpoint, core_time)`` in ascending rank.
        """
        if not 0 <= u < self._n:
            raise ValueError(f"Vertex {u} is not in [0, {self._n}).")
        check_window(self._t_max, ts, ts)
        a = self.arrays
        return [(int(a["item_edge"][i]), self._item_other[i], self._item_core[i])
                for i in self._items(u, ts)]

    def msf_edges_at(self, ts):
        """Sorted ids of the CT-MSF edges of start time ``ts``."""
        return sorted({edge_id for u in range(self._n)
                       for edge_id, _, _ in self.incident_at(u, ts)})

    def search(self, u, ts, te):
        u, ts, te = check_query(self, (u, ts, te))
        return _vertex_search(self, u, ts, te)

    def serialize(self, sink):
        serialize(self, sink)


def _vertex_search(idx, u, ts, te):
    searches = 1
    first = [i for i in idx._items(u, ts) if idx._item_core[i] <= te]
    if not first:
        return (), 0, searches
    seen = {u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        items = idx._items(x, ts)
        searches += 1
        for i in items:
            other = idx._item_other[i]
            if idx._item_core[i] <= te and other not in seen:
                seen.add(other)
                queue.append(other)
    return tuple(sorted(seen)), len(seen), searches


def build_ctmsf(g, k, table=None):
    """
    Build the baseline index of ``g`` for ``k``.

    Parameters
    ----------
    g: `tkcore.graph.TemporalGraph`
    k: `int`
    table: `tkcore.coretime.CoreTimeTable`, optional
        Precomputed edge core times for the same ``g`` and ``k``.

    Returns
    -------
    index: `CTMSFIndex`
    """
    k = _check_k(k)
    start = time.perf_counter()
    if table is None:
        table = all_edge_core_times(g, k)
    t_max = g.t_max
    edge_u = g.u.tolist()
    edge_v = g.v.tolist()
    # Each pair holds from its start time up to the start of the next pair.
    changes = {}
    for edge_id in range(g.m):
        pairs = table.pairs(edge_id)
        for i, (_, core_time) in enumerate(pairs):
            lst = pairs[i + 1][0] - 1 if i + 1 < len(pairs) else t_max
            changes.setdefault(lst, []).append((edge_id, core_time))

    core = np.full(g.m, INFINITY, dtype=np.int64)
    records = [[] for _ in range(g.n)]
    current = [[] for _ in range(g.n)]
    n_records = 0
    for ts in range(t_max, 0, -1):
        for edge_id, core_time in changes.get(ts, ()):
            core[edge_id] = core_time
        incident = [[] for _ in range(g.n)]
        for edge_id in _kruskal(g.n, edge_u, edge_v, _rank_order(core)):
            core_time = int(core[edge_id])
            incident[edge_u[edge_id]].append((edge_id, edge_v[edge_id], core_time))
            incident[edge_v[edge_id]].append((edge_id, edge_u[edge_id], core_time))
        for u in range(g.n):
            if incident[u] != current[u]:
                records[u].append((ts, incident[u]))
                current[u] = incident[u]
                n_records += 1

    index = CTMSFIndex(k, g.n, t_max, _pack(records, g.labels, g.time_axis),
                       build_info={"records": n_records})
    index.build_info["seconds"] = time.perf_counter() - start
    log.info(f"Built CT-MSF index for k={k}: {n_records} vertex lists "
             f"in {index.build_info['seconds']:.3f} s")
    return index


def _pack(records, labels, times):
    offsets = np.zeros(len(records) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(r) for r in records])
    flat = [record for vertex_records in records for record in vertex_records]
    items = [item for _, edges in flat for item in edges]
    record_item = np.zeros(len(flat) + 1, dtype=np.int64)
    record_item[1:] = np.cumsum([len(edges) for _, edges in flat])
    return {
        "record_offsets": offsets,
        "record_start": np.array([start for start, _ in flat], dtype=np.int64),
        "record_item": record_item,
        "item_edge": np.array([item[0] for item in items], dtype=np.int64),
        "item_other": np.array([item[1] for item in items], dtype=np.int64),
        "item_core": np.array([item[2] for item in items], dtype=np.int64),
        "labels": np.asarray(labels, dtype=np.int64),
        "times": np.asarray(times, dtype=np.int64),
    }


def ctmsf_query(idx, q):
    """
    Breadth-first search over the CT-MSF of start time ``q.ts``.

    From ``q.u``, follow incident forest edges with core time at most
    ``q.te``.

    Returns
    -------
    result: `tuple` of `int`
        Sorted vertex ids; empty if ``q.u`` has no such edge.
    """
    return idx.query(*q)


def serialize(idx, sink):
    a = idx.arrays
    header = (idx.k, idx.n_vertices, idx.t_max, len(a["record_start"]), len(a["item_edge"]))
    write_sections(sink, MAGIC, header,
                   [(dtype, a[name]) for name, dtype in CTMSFIndex.SECTIONS])


def _layout(header):
    _, n, t_max, n_records, n_items = header
    lengths = {"record_offsets": n + 1, "record_start": n_records,
               "record_item": n_records + 1, "labels": n,
               "times": t_max}
    return [(name, dtype, lengths.get(name, n_items)) for name, dtype in CTMSFIndex.SECTIONS]


def deserialize(source):
    """
    Read a `CTMSFIndex` written by `serialize`.

    Raises
    ------
    tkcore.exceptions.IndexFormatError
    """
    header, arrays = read_sections(source, MAGIC, "CT-MSF", 5, _layout)
    k, n, t_max, n_records, n_items = header
    for name, total in (("record_offsets", n_records), ("record_item", n_items)):
        offsets = arrays[name]
        if offsets[0] != 0 or offsets[-1] != total or np.any(np.diff(offsets) < 0):
            raise IndexFormatError(f"Section {name!r} is inconsistent with the header.")
    return CTMSFIndex(k, n, t_max, arrays)
