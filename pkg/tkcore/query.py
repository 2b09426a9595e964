"""
Temporal k-core component search over a built index.
"""
import time
from collections import deque, namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from tkcore.config import conf
from tkcore.graph import check_window

__all__ = ['Query', 'QueryStats', 'check_query', 'forest_search', 'query', 'query_with_stats',
           'batch_query']

VERTEX_ERROR = "Vertex {0} is not in [0, {1})."


class Query(namedtuple("Query", ["u", "ts", "te"])):
    """
    Find the component of vertex ``u`` in the temporal k-core of ``[ts, te]``.
    """

    __slots__ = ()


@dataclass
class QueryStats:
    nodes_visited: int
    binary_searches: int
    elapsed: float
    size: int


def check_query(idx, q):
    """
    Validate a query against an index.

    Returns
    -------
    q: `Query`

    Raises
    ------
    ValueError
        If the vertex or the window is out of range.
    """
    u, ts, te = q
    if int(u) != u or not 0 <= u < idx.n_vertices:
        raise ValueError(VERTEX_ERROR.format(u, idx.n_vertices))
    window = check_window(idx.t_max, ts, te)
    return Query(int(u), window.ts, window.te)


def forest_search(idx, u, ts, te):
    """
    Breadth-first search over the ECB-Forest of start time ``ts``.

    Starting from the lowest-ranked forest node incident to ``u``, expand
    parents and children whose core time is at most ``te``; the endpoints of
    every expanded node form the answer.

    Parameters
    ----------
    idx: `tkcore.pecb.PECBIndex`
    u, ts, te: `int`
        An already validated query.

    Returns
    -------
    result: `tuple` of `int`
    visited: `int`
    searches: `int`
    """
    # u is in the core of [ts, te] iff some CT-MSF edge at u has core time
    # <= te, and the lowest-ranked node at u has the smallest core time of
    # them all.  Nodes with core time <= te that share a component form one
    # connected subtree, since every parent outranks its children, so one
    # seed reaches the whole component.
    seed = idx.entry_node_at(u, ts)
    searches = 1
    if seed is None or idx.core_time(seed) > te:
        return (), 0, searches
    visited = {seed}
    queue = deque([seed])
    vertices = set()
    while queue:
        node = queue.popleft()
        vertices.update(idx.endpoints(node))
        neighbors = idx._neighbors(node, ts)
        searches += 1
        if neighbors is None:
            continue
        for other in neighbors:
            if other is not None and other not in visited and idx.core_time(other) <= te:
                visited.add(other)
                queue.append(other)
    return tuple(sorted(vertices)), len(visited), searches


def query_with_stats(idx, q):
    """
    Answer one query on any index kind, timing it.

    Returns
    -------
    result: `tuple` of `int`
    stats: `QueryStats`
    """
    q = check_query(idx, q)
    start = time.perf_counter()
    result, visited, searches = idx.search(*q)
    elapsed = time.perf_counter() - start
    return result, QueryStats(visited, searches, elapsed, len(result))


def query(idx, q):
    """
    Vertices of the temporal k-core component of ``q.u`` in ``[q.ts, q.te]``.

    Parameters
    ----------
    idx: `tkcore.meta.TemporalIndexABC`
    q: `Query` or 3-`tuple`

    Returns
    -------
    result: `tuple` of `int`
        Sorted dense vertex ids; empty if ``q.u`` is not in the core.
    """
    return query_with_stats(idx, q)[0]


def batch_query(idx, queries, workers=None, with_stats=False):
    """
    Answer many queries, possibly on several threads.

    All queries are validated before any is run.  Results are in the order
    of ``queries`` whatever the number of workers.

    Parameters
    ----------
    idx: `tkcore.meta.TemporalIndexABC`
    queries: iterable of `Query`
    workers: `int`, optional
        Worker threads.  Default is ``conf.query_workers``.
    with_stats: `bool`, optional
        Also return a `QueryStats` per query.

    Returns
    -------
    results: `list` of `tuple`
    stats: `list` of `QueryStats`
        Only if ``with_stats``.

    Raises
    ------
    ValueError
        For the first invalid query, naming its position.
    """
    checked = []
    for i, q in enumerate(queries):
        try:
            checked.append(check_query(idx, q))
        except (TypeError, ValueError) as e:
            raise ValueError(f"Query {i} {q!r}: {e}") from e
    workers = conf.query_workers if workers is None else int(workers)
    if workers > 1 and len(checked) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            answers = list(pool.map(lambda q: query_with_stats(idx, q), checked))
    else:
        answers = [query_with_stats(idx, q) for q in checked]
    results = [result for result, _ in answers]
    if with_stats:
        return results, [stats for _, stats in answers]
    return results
