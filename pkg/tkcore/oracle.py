"""
Brute-force answers computed directly from the definitions.

Nothing here is fast; these functions exist to check the indexes.
"""
from tkcore.coretime import INFINITY
from tkcore.graph import check_window, connected_components, peel_k_core, project

__all__ = ['temporal_k_core', 'window_components', 'tccs_oracle', 'edge_core_time_oracle']


def temporal_k_core(g, k, w):
    """
    The k-core of the projection of ``g`` onto window ``w``.

    Returns
    -------
    core: `tkcore.graph.StaticGraph`
    """
    w = check_window(g.t_max, *w)
    return peel_k_core(project(g, w), k)


def window_components(g, k, w):
    """
    Map every vertex of the temporal k-core of ``w`` to its component.

    Returns
    -------
    components: `dict`
        Vertex to the sorted `tuple` of its component's vertices.
    """
    return {u: component
            for component in connected_components(temporal_k_core(g, k, w))
            for u in component}


def tccs_oracle(g, k, u, w):
    """
    Vertices of the temporal k-core component containing ``u``.

    Returns
    -------
    result: `tuple` of `int`
        Sorted vertex ids; empty if ``u`` is not in the temporal k-core.
    """
    if not 0 <= u < g.n:
        raise ValueError(f"Vertex {u} is not in [0, {g.n}).")
    return window_components(g, k, w).get(u, ())


def edge_core_time_oracle(g, k, edge_id, ts):
    """
    Earliest end time at which an edge belongs to the temporal k-core.

    Parameters
    ----------
    g: `tkcore.graph.TemporalGraph`
    k: `int`
    edge_id: `int`
    ts: `int`
        Start time.

    Returns
    -------
    core_time: `int`
        The smallest ``te >= ts`` for which both endpoints are in the k-core
        of ``[ts, te]`` and the edge's timestamp lies in ``[ts, te]``, or
        `~tkcore.coretime.INFINITY` if there is none.
    """
    edge = g.edge(edge_id)
    check_window(g.t_max, ts, ts)
    if edge.t < ts:
        return INFINITY
    for te in range(edge.t, g.t_max + 1):
        core = temporal_k_core(g, k, (ts, te))
        if edge.u in core and edge.v in core:
            return te
    return INFINITY
