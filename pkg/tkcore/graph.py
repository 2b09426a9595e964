"""
Temporal graphs, time windows and static k-core peeling.
"""
import os
import textwrap
import warnings
from collections import namedtuple

import networkx as nx
import numpy as np

from tkcore.exceptions import EdgeListParseError, TkcoreUserWarning
from tkcore.meta import GraphMeta

__all__ = ['TemporalEdge', 'TimeWindow', 'TemporalGraph', 'StaticGraph', 'load_edge_list',
           'normalize_timestamps', 'compress_timestamps', 'axis_window', 'aggregate_days',
           'project', 'peel_k_core', 'core_numbers', 'connected_components', 'check_window']

SECONDS_PER_DAY = 86400
MILLISECONDS_PER_DAY = SECONDS_PER_DAY * 1000
COMMENT_PREFIXES = ("#", "%")

EMPTY_INPUT_ERROR = "Edge list contains no edges."
FIELD_COUNT_ERROR = "expected 3 whitespace-separated integers 'u v t', got {0} field(s)"
FIELD_VALUE_ERROR = "fields must be non-negative integers, got {0!r}"
WINDOW_ERROR = "Time window [{0}, {1}] is not within [1, {2}] with start <= end."
K_ERROR = "k must be a positive integer, got {0!r}."
RAW_TIME_ERROR = "Timestamps must be positive; use --normalize or --aggregate-days."


TemporalEdge = namedtuple("TemporalEdge", ["edge_id", "u", "v", "t"])


class TimeWindow(namedtuple("TimeWindow", ["ts", "te"])):
    """
    Inclusive time window ``[ts, te]``.
    """

    __slots__ = ()

    def __contains__(self, t):
        return self.ts <= t <= self.te


def check_window(t_max, ts, te):
    """
    Validate a window against a graph's last timestamp.

    Returns
    -------
    window: `TimeWindow`

    Raises
    ------
    ValueError
        If not ``1 <= ts <= te <= t_max``.
    """
    if not (1 <= ts <= te <= t_max):
        raise ValueError(WINDOW_ERROR.format(ts, te, t_max))
    return TimeWindow(int(ts), int(te))


def _check_k(k):
    if int(k) != k or k < 1:
        raise ValueError(K_ERROR.format(k))
    return int(k)


class TemporalGraph:
    """
    An undirected temporal multigraph.

    Edges are stored with ``u < v`` and are numbered in nondecreasing
    timestamp order, ties keeping input order.  Instances are immutable.

    Parameters
    ----------
    src, dst: array-like of `int`
        Dense endpoint ids in ``0 .. n - 1``.  Self-loops are not allowed.

    times: array-like of `int`
        Timestamp of every edge.

    n: `int`, optional
        Number of vertices.  Default is one more than the largest endpoint.

    labels: array-like of `int`, optional
        Original label of every dense vertex id.  Default is the identity.

    meta: `tkcore.meta.GraphMeta` or `dict`, optional
        Provenance of the graph.
    """

    def __init__(self, src, dst, times, n=None, labels=None, meta=None):
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        times = np.asarray(times, dtype=np.int64).ravel()
        if not (len(src) == len(dst) == len(times)):
            raise ValueError("src, dst and times must have the same length.")
        if np.any(src == dst):
            raise ValueError("Self-loops are not allowed in a TemporalGraph.")
        if np.any(times < 0):
            raise ValueError("Timestamps must be non-negative.")
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError(f"Endpoints must lie in [0, {n}).")
        order = np.argsort(times, kind="stable")
        self._u = _frozen(np.minimum(src, dst)[order])
        self._v = _frozen(np.maximum(src, dst)[order])
        self._t = _frozen(times[order])
        self._n = int(n)
        if labels is None:
            labels = np.arange(self._n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != self._n:
            raise ValueError("labels must have one entry per vertex.")
        self._labels = _frozen(labels)
        self.meta = GraphMeta(meta)
        self._per_vertex = None

    def __str__(self):
        return textwrap.dedent(f"""\
                {self.__class__.__name__}
                {"".join(["-"] * len(self.__class__.__name__))}
                Vertices: {self.n}
                Temporal edges: {self.m}
                Time range: {self.t_min} to {self.t_max}
                Source: {self.meta.source}""")

    def __repr__(self):
        return f"{object.__repr__(self)}\n{str(self)}"

    @property
    def n(self):
        return self._n

    @property
    def m(self):
        return len(self._t)

    @property
    def t_max(self):
        return int(self._t[-1]) if self.m else 0

    @property
    def t_min(self):
        return int(self._t[0]) if self.m else 0

    @property
    def u(self):
        """Smaller endpoint of every edge, indexed by edge id."""
        return self._u

    @property
    def v(self):
        """Larger endpoint of every edge, indexed by edge id."""
        return self._v

    @property
    def t(self):
        """Timestamp of every edge, nondecreasing in edge id."""
        return self._t

    @property
    def labels(self):
        return self._labels

    @property
    def edges(self):
        return [TemporalEdge(i, u, v, t) for i, (u, v, t) in
                enumerate(zip(self._u.tolist(), self._v.tolist(), self._t.tolist()))]

    def edge(self, edge_id):
        if not 0 <= edge_id < self.m:
            raise ValueError(f"Unknown edge id {edge_id}; graph has {self.m} edges.")
        return TemporalEdge(int(edge_id), int(self._u[edge_id]), int(self._v[edge_id]),
                            int(self._t[edge_id]))

    @property
    def per_vertex(self):
        """
        Adjacency of every vertex as a list of ``(neighbor, t, edge_id)``.

        Entries are sorted by edge id and appear at both endpoints.
        """
        if self._per_vertex is None:
            per_vertex = [[] for _ in range(self._n)]
            for edge_id, (u, v, t) in enumerate(zip(self._u.tolist(), self._v.tolist(),
                                                    self._t.tolist())):
                per_vertex[u].append((v, t, edge_id))
                per_vertex[v].append((u, t, edge_id))
            self._per_vertex = per_vertex
        return self._per_vertex

    def edge_range(self, ts, te):
        """
        Edge ids with timestamps in ``[ts, te]``, as a `range`.
        """
        lo = int(np.searchsorted(self._t, ts, side="left"))
        hi = int(np.searchsorted(self._t, te, side="right"))
        return range(lo, max(lo, hi))

    def label_of(self, vertex):
        return int(self._labels[vertex])

    def vertex_of(self, label):
        """Dense id of an original vertex label."""
        hits = np.flatnonzero(self._labels == label)
        if len(hits) == 0:
            raise ValueError(f"Vertex label {label} does not occur in the graph.")
        return int(hits[0])

    def with_times(self, times, **meta_updates):
        """
        A copy of this graph with the timestamps (in edge id order) replaced.

        A recorded ``time_axis`` is dropped unless given again.
        """
        meta = self.meta.derive(**meta_updates)
        if "time_axis" not in meta_updates:
            meta.pop("time_axis", None)
        return self.__class__(self._u, self._v, times, n=self._n, labels=self._labels,
                              meta=meta)

    @property
    def time_axis(self):
        """
        Input timestamp of every time ``1 .. t_max``.

        The identity unless the graph came from `compress_timestamps`.
        """
        axis = self.meta.time_axis
        if axis is None:
            return np.arange(1, self.t_max + 1, dtype=np.int64)
        return np.asarray(axis, dtype=np.int64)


def _frozen(array):
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


def _iter_lines(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r") as f:
            yield from f
    else:
        yield from source


def load_edge_list(source):
    """
    Read a whitespace-separated ``u v t`` edge list.

    Lines starting with ``#`` or ``%`` and blank lines are ignored.  Vertex
    labels are relabeled densely in ascending label order; the original
    labels are kept in `TemporalGraph.labels`.  Self-loops are dropped with a
    `~tkcore.exceptions.TkcoreUserWarning` and duplicate lines are kept.
    Timestamps are not normalized.

    Parameters
    ----------
    source: `str`, path-like, or iterable of `str`
        A file name, an open text file, or any iterable of lines.

    Returns
    -------
    graph: `TemporalGraph`

    Raises
    ------
    tkcore.exceptions.EdgeListParseError
        On a malformed line or input without any edge line.
    """
    rows = []
    for line_number, line in enumerate(_iter_lines(source), start=1):
        line = line.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise EdgeListParseError(FIELD_COUNT_ERROR.format(len(fields)), line_number)
        try:
            values = [int(field) for field in fields]
        except ValueError:
            raise EdgeListParseError(FIELD_VALUE_ERROR.format(line), line_number) from None
        if min(values) < 0:
            raise EdgeListParseError(FIELD_VALUE_ERROR.format(line), line_number)
        rows.append(values)
    if not rows:
        raise EdgeListParseError(EMPTY_INPUT_ERROR)
    raw = np.array(rows, dtype=np.int64)
    labels, dense = np.unique(raw[:, :2], return_inverse=True)
    dense = dense.reshape(-1, 2)
    loops = dense[:, 0] == dense[:, 1]
    n_loops = int(loops.sum())
    if n_loops:
        warnings.warn(f"Dropped {n_loops} self-loop(s) from the edge list.", TkcoreUserWarning)
    keep = ~loops
    meta = {"source": os.fspath(source) if isinstance(source, (str, os.PathLike)) else None,
            "self_loops_dropped": n_loops}
    return TemporalGraph(dense[keep, 0], dense[keep, 1], raw[keep, 2], n=len(labels),
                         labels=labels, meta=meta)


def normalize_timestamps(g):
    """
    Rank-compress timestamps to ``1 .. t_max`` preserving their order.

    Returns
    -------
    graph: `TemporalGraph`
        Same edges and edge ids with normalized timestamps.

    mapping: `dict`
        Raw timestamp to normalized timestamp.
    """
    distinct, ranks = np.unique(g.t, return_inverse=True)
    mapping = {int(raw): i + 1 for i, raw in enumerate(distinct.tolist())}
    return g.with_times(ranks + 1, timestamp_mapping=mapping), mapping


def compress_timestamps(g):
    """
    Rank-compress timestamps but remember the raw time of every rank.

    Builds then sweep only the distinct timestamps, and indexes built from
    the result keep the raw times so windows can be given in raw time with
    `axis_window`.  Raw timestamps must be positive.

    Returns
    -------
    graph: `TemporalGraph`
        Normalized graph whose `TemporalGraph.time_axis` holds the raw
        timestamps.
    """
    if g.m and g.t_min < 1:
        raise ValueError(RAW_TIME_ERROR)
    normalized, mapping = normalize_timestamps(g)
    return normalized.with_times(normalized.t, timestamp_mapping=mapping,
                                 time_axis=sorted(mapping))


def axis_window(time_axis, start, end):
    """
    Translate a raw time window onto the ranks of a time axis.

    Parameters
    ----------
    time_axis: array-like of `int`
        Increasing raw timestamp of every rank ``1 .. len(time_axis)``.
    start, end: `int`
        Inclusive raw window with ``1 <= start <= end <= time_axis[-1]``.

    Returns
    -------
    window: `TimeWindow` or `None`
        The ranks whose raw times lie in ``[start, end]``, or `None` when no
        timestamp does.
    """
    time_axis = np.asarray(time_axis)
    last = int(time_axis[-1]) if len(time_axis) else 0
    if not (1 <= start <= end <= last):
        raise ValueError(WINDOW_ERROR.format(start, end, last))
    ts = int(np.searchsorted(time_axis, start, side="left")) + 1
    te = int(np.searchsorted(time_axis, end, side="right"))
    return TimeWindow(ts, te) if ts <= te else None


def aggregate_days(g, epoch_seconds=True):
    """
    Bucket epoch timestamps into calendar days, then normalize them.

    Parameters
    ----------
    g: `TemporalGraph`
        Graph whose raw timestamps are UNIX epoch times.

    epoch_seconds: `bool`
        If True, raw timestamps are seconds; if False, milliseconds.

    Returns
    -------
    graph: `TemporalGraph`
    """
    if np.any(g.t < 0):
        raise ValueError("Epoch timestamps must not be negative.")
    per_day = SECONDS_PER_DAY if epoch_seconds else MILLISECONDS_PER_DAY
    days = g.t // per_day
    by_day = g.with_times(days, aggregation="day")
    normalized, _ = normalize_timestamps(by_day)
    return normalized


class StaticGraph(nx.Graph):
    """
    A simple undirected graph, as a `networkx.Graph`.

    Vertices without neighbors are not stored by `project` or `peel_k_core`.
    """

    @classmethod
    def from_pairs(cls, pairs):
        s = cls()
        s.add_edges_from((u, v) for u, v in pairs if u != v)
        return s

    def __repr__(self):
        return f"{self.__class__.__name__}(vertices={len(self)}, edges={self.n_edges})"

    @property
    def vertices(self):
        return tuple(sorted(self.nodes))

    @property
    def n_edges(self):
        return self.number_of_edges()

    def edge_pairs(self):
        return sorted((min(u, v), max(u, v)) for u, v in self.edges)


def project(g, w):
    """
    The simple graph of all edges with timestamps inside window ``w``.

    Parallel temporal edges collapse to one edge and isolated vertices are
    omitted.
    """
    ts, te = w
    edge_ids = g.edge_range(ts, te)
    return StaticGraph.from_pairs(zip(g.u[edge_ids.start:edge_ids.stop].tolist(),
                                      g.v[edge_ids.start:edge_ids.stop].tolist()))


def peel_k_core(s, k):
    """
    The k-core of a static graph, which may be disconnected or empty.

    Every remaining vertex has at least ``k`` distinct neighbors among the
    remaining vertices.
    """
    k = _check_k(k)
    return nx.k_core(s, k)


def core_numbers(s):
    """
    Core number of every vertex of a static graph.

    Returns
    -------
    cores: `dict`
        Vertex to the largest k whose k-core contains it.
    """
    return nx.core_number(s)


def connected_components(s):
    """
    Connected components of a static graph.

    Returns
    -------
    components: `list` of `tuple`
        Sorted vertex tuples, ordered by their smallest vertex.
    """
    return sorted(tuple(sorted(component)) for component in nx.connected_components(s))
