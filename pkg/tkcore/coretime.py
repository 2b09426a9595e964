"""
Vertex and edge core times for every start time.

The core time of an edge for a start time ``ts`` is the earliest end time
``te`` for which the edge lies in the temporal k-core of ``[ts, te]``.
`CoreTimeTable` keeps, per edge, only the start times at which that value
changes.
"""
import bisect
import os
import time

import numpy as np
from astropy.table import Table

from tkcore import log
from tkcore.graph import _check_k, check_window

__all__ = ['INFINITY', 'CSV_COLUMNS', 'CoreTimeTable', 'vertex_core_times_at',
           'all_edge_core_times', 'core_time_at', 'format_core_time']

#: Core time of an edge or vertex that never enters the k-core.
INFINITY = 2 ** 31 - 1

CSV_COLUMNS = ("edgeId", "u", "v", "t", "startTime", "coreTime")


def format_core_time(value, time_axis=None):
    """
    A core time as text, ``inf`` for `INFINITY`.

    With ``time_axis`` (indexed by time, element 0 unused) the raw time is
    written.
    """
    if value == INFINITY:
        return "inf"
    return str(value if time_axis is None else time_axis[value])


def vertex_core_times_at(g, k, ts):
    """
    Core time of every vertex for start time ``ts``.

    Starts from the k-core of ``[ts, t_max]`` and deletes the edges of one
    timestamp at a time, latest first, re-peeling only the vertices whose
    degree drops.  A vertex evicted after the edges at ``t`` are gone has
    core time ``t``.

    Returns
    -------
    ct: `numpy.ndarray`
        Core time per vertex, `INFINITY` for vertices never in a core.
    """
    k = _check_k(k)
    t_max = g.t_max
    check_window(t_max, ts, ts)
    ct = np.full(g.n, INFINITY, dtype=np.int64)
    edge_ids = g.edge_range(ts, t_max)
    us = g.u[edge_ids.start:edge_ids.stop].tolist()
    vs = g.v[edge_ids.start:edge_ids.stop].tolist()
    times = g.t[edge_ids.start:edge_ids.stop].tolist()

    # Parallel temporal edges count once towards a degree, so keep multiplicities.
    multiplicity = {}
    for u, v in zip(us, vs):
        for a, b in ((u, v), (v, u)):
            neighbors = multiplicity.setdefault(a, {})
            neighbors[b] = neighbors.get(b, 0) + 1
    alive = set(multiplicity)
    degree = {u: len(neighbors) for u, neighbors in multiplicity.items()}

    def repeel(worklist, core_time):
        while worklist:
            x = worklist.pop()
            if x not in alive or degree[x] >= k:
                continue
            alive.discard(x)
            if core_time is not None:
                ct[x] = core_time
            for w in multiplicity[x]:
                if w in alive:
                    degree[w] -= 1
                    if degree[w] < k:
                        worklist.append(w)

    repeel([u for u in alive if degree[u] < k], None)

    i = len(times)
    while i > 0 and alive:
        t = times[i - 1]
        worklist = []
        while i > 0 and times[i - 1] == t:
            i -= 1
            u, v = us[i], vs[i]
            multiplicity[u][v] -= 1
            multiplicity[v][u] -= 1
            if multiplicity[u][v] == 0:
                del multiplicity[u][v]
                del multiplicity[v][u]
                if u in alive and v in alive:
                    degree[u] -= 1
                    degree[v] -= 1
                    worklist.extend((u, v))
        repeel(worklist, t)
    return ct


class CoreTimeTable:
    """
    Change-compressed edge core times for all start times.

    For every edge the table stores ascending ``(start_time, core_time)``
    pairs; a pair is present only where the core time differs from the one
    of the previous start time, and the first pair always has start time 1.

    Parameters
    ----------
    k: `int`
    t_max: `int`
    pairs: `list` of `list` of `tuple`
        Per edge id, the compressed ``(start_time, core_time)`` pairs.
    edge_times: array-like of `int`
        Timestamp of every edge.
    sweeps: `int`, optional
        Number of deletion sweeps that produced the table.
    """

    def __init__(self, k, t_max, pairs, edge_times, sweeps=0):
        self.k = k
        self.t_max = t_max
        self._pairs = [tuple(p) for p in pairs]
        self._starts = [[s for s, _ in p] for p in self._pairs]
        self.edge_times = np.asarray(edge_times)
        self.sweeps = sweeps

    def __len__(self):
        return len(self._pairs)

    def __eq__(self, other):
        if not isinstance(other, CoreTimeTable):
            return NotImplemented
        return (self.k, self.t_max, self._pairs) == (other.k, other.t_max, other._pairs)

    def pairs(self, edge_id):
        """Compressed ``(start_time, core_time)`` pairs of one edge."""
        return self._pairs[edge_id]

    def core_time_at(self, edge_id, ts):
        if not 0 <= edge_id < len(self._pairs):
            raise ValueError(f"Unknown edge id {edge_id}.")
        i = bisect.bisect_right(self._starts[edge_id], ts) - 1
        if i < 0:
            return INFINITY
        return self._pairs[edge_id][i][1]

    def versions(self):
        """
        Every finite core-time version of every edge.

        Yields
        ------
        version: `tuple`
            ``(edge_id, core_time, lst)`` where ``lst`` is the latest start
            time at which the edge has that core time.
        """
        for edge_id, pairs in enumerate(self._pairs):
            for i, (_, core_time) in enumerate(pairs):
                if core_time == INFINITY:
                    continue
                lst = pairs[i + 1][0] - 1 if i + 1 < len(pairs) else self.t_max
                yield edge_id, core_time, lst

    def to_table(self, g):
        """
        ``edgeId,u,v,t,startTime,coreTime`` rows, one per stored pair.

        Endpoints are original vertex labels and times are mapped through
        ``g.time_axis``; a missing core time is written as ``inf``.

        Returns
        -------
        rows: `astropy.table.Table`
        """
        axis = np.concatenate([[0], g.time_axis]).tolist()
        rows = []
        for edge_id, pairs in enumerate(self._pairs):
            edge = g.edge(edge_id)
            for start, core_time in pairs:
                rows.append((edge_id, g.label_of(edge.u), g.label_of(edge.v), axis[edge.t],
                             axis[start], format_core_time(core_time, axis)))
        return Table(rows=rows or None, names=CSV_COLUMNS,
                     dtype=(int, int, int, int, int, str))

    def write_csv(self, sink, g):
        """
        Write `to_table` as CSV to a path or text file object.
        """
        rows = self.to_table(g)
        if isinstance(sink, (str, os.PathLike)):
            rows.write(sink, format="ascii.csv", overwrite=True)
        else:
            rows.write(sink, format="ascii.csv")


def core_time_at(table, edge_id, ts):
    """
    Core time of an edge at start time ``ts``, from a `CoreTimeTable`.
    """
    return table.core_time_at(edge_id, ts)


def all_edge_core_times(g, k):
    """
    Edge core times for every start time ``1 .. t_max``.

    For start time ``ts`` an edge ``(u, v, t)`` has core time
    ``max(t, ct[u], ct[v])`` if ``t >= ts`` and `INFINITY` otherwise, where
    ``ct`` are the vertex core times of `vertex_core_times_at`.

    Returns
    -------
    table: `CoreTimeTable`
    """
    k = _check_k(k)
    if g.t_max >= INFINITY:
        raise ValueError(f"Timestamps must be below {INFINITY}; compress them first.")
    start = time.perf_counter()
    t_max = g.t_max
    edge_u = g.u.astype(np.int64)
    edge_v = g.v.astype(np.int64)
    edge_t = g.t.astype(np.int64)
    pairs = [[] for _ in range(g.m)]
    previous = np.full(g.m, -1, dtype=np.int64)
    for ts in range(1, t_max + 1):
        ct = vertex_core_times_at(g, k, ts)
        current = np.maximum(edge_t, np.maximum(ct[edge_u], ct[edge_v]))
        current[edge_t < ts] = INFINITY
        for edge_id in np.flatnonzero(current != previous).tolist():
            pairs[edge_id].append((ts, int(current[edge_id])))
        previous = current
    log.debug(f"Edge core times for k={k}: {t_max} sweeps over {g.m} edges "
              f"in {time.perf_counter() - start:.3f} s")
    return CoreTimeTable(k, t_max, pairs, edge_t, sweeps=t_max)
