"""
Incremental maintenance of an ECB-Forest.

An ECB-Forest is a binary forest over the edges of a core-time minimum
spanning forest.  Node ``x = (u, v)`` has as left (right) child the
highest-ranked node connected to ``u`` (``v``) through nodes ranked below
``x``, so every parent outranks its children.  Rank is the lexicographic
order of ``(core_time, edge_id)``.

Going from one start time to the previous one only ever adds edge versions
with smaller core times, so the forest is maintained by insertion alone: a
new node is hung below the two chains above its endpoints, the chains are
zipped together by rank and, if the endpoints were already connected, their
lowest common ancestor (the highest-ranked node on the cycle) is removed.
"""
import bisect
from collections import namedtuple

from tkcore.exceptions import ForestInvariantError

__all__ = ['RankKey', 'ForestNode', 'Anchors', 'LiveForestState', 'rank_less',
           'find_insertion', 'insert_node', 'merge']

LEFT = 0
RIGHT = 1

ANCHOR_NOT_LIVE_ERROR = "Anchor node {0} of node {1} is not live."
SLOT_TAKEN_ERROR = "Child slot {0} of node {1} is already taken by node {2}."
MERGE_RUNAWAY_ERROR = "Merge of node {0} did not terminate; the cycle was not eliminated."


RankKey = namedtuple("RankKey", ["core_time", "edge_id"])
RankKey.__doc__ = "Total order of forest nodes; a larger key ranks higher."


class ForestNode:
    """
    One core-time version of one temporal edge.

    Parameters
    ----------
    node_id: `int`
    edge_id: `int`
    u, v: `int`
        Endpoints, ``u < v``.
    core_time: `int`
        Finite core time of this version.
    created_ts: `int` or `None`
        Highest start time at which the version is in the forest, `None` if
        it never enters it.
    deleted_ts: `int` or `None`
        Highest start time at which the version has left the forest again.
    """

    __slots__ = ("node_id", "edge_id", "u", "v", "core_time", "created_ts", "deleted_ts")

    def __init__(self, node_id, edge_id, u, v, core_time, created_ts=None, deleted_ts=None):
        self.node_id = node_id
        self.edge_id = edge_id
        self.u = u
        self.v = v
        self.core_time = core_time
        self.created_ts = created_ts
        self.deleted_ts = deleted_ts

    @property
    def rank(self):
        return RankKey(self.core_time, self.edge_id)

    def __repr__(self):
        return (f"ForestNode(node_id={self.node_id}, edge_id={self.edge_id}, u={self.u}, "
                f"v={self.v}, core_time={self.core_time})")


def rank_less(a, b):
    """
    Whether node ``a`` ranks strictly below node ``b``.
    """
    return a.rank < b.rank


Anchors = namedtuple("Anchors", ["l", "r", "eu", "ev", "convergent"])
Anchors.__doc__ = """
Where a new node attaches.

``l`` (``r``) is the highest-ranked node connected to the new node's ``u``
(``v``) through lower-ranked nodes, ``eu`` (``ev``) the lowest-ranked node
above the new node on that side.  ``convergent`` is True when ``l`` and ``r``
coincide, i.e. the endpoints are already connected below the new node.
"""


class LiveForestState:
    """
    The mutable ECB-Forest of the start time under construction.

    Parameters
    ----------
    n_vertices: `int`
    """

    def __init__(self, n_vertices):
        self.nodes = []
        self.parent = []
        self.children = []
        self.live = set()
        # Per vertex, the sorted (rank, node_id) pairs of live incident nodes.
        self.incident = [[] for _ in range(n_vertices)]
        self.dirty_nodes = set()
        self.dirty_vertices = set()
        self.ts = None
        self._vacated = {}
        self._sides = (None, None)

    def add_node(self, edge_id, u, v, core_time):
        """Register a new edge version; it is not live until inserted."""
        node = ForestNode(len(self.nodes), edge_id, u, v, core_time)
        self.nodes.append(node)
        self.parent.append(None)
        self.children.append([None, None])
        return node

    def rank(self, node_id):
        return self.nodes[node_id].rank

    def is_live(self, node_id):
        return node_id in self.live

    def lowest_incident(self, vertex):
        incident = self.incident[vertex]
        return incident[0][1] if incident else None

    def neighbors(self, node_id):
        """``(parent, left, right)`` of a live node."""
        left, right = self.children[node_id]
        return self.parent[node_id], left, right

    def activate(self, node):
        node.created_ts = self.ts
        self.live.add(node.node_id)
        for vertex in (node.u, node.v):
            bisect.insort(self.incident[vertex], (node.rank, node.node_id))
            self.dirty_vertices.add(vertex)
        self.dirty_nodes.add(node.node_id)

    def remove(self, node_id):
        node = self.nodes[node_id]
        if self.parent[node_id] is not None or self.children[node_id] != [None, None]:
            raise ForestInvariantError(f"Node {node_id} is removed while still linked.")
        node.deleted_ts = self.ts
        self.live.discard(node_id)
        for vertex in (node.u, node.v):
            incident = self.incident[vertex]
            del incident[bisect.bisect_left(incident, (node.rank, node_id))]
            self.dirty_vertices.add(vertex)
        self.dirty_nodes.discard(node_id)

    def slot_of(self, child):
        parent = self.parent[child]
        if parent is None:
            return None
        return self.children[parent].index(child)

    def detach(self, child):
        """Cut ``child`` from its parent, remembering the slot it freed."""
        parent = self.parent[child]
        if parent is None:
            return
        slot = self.children[parent].index(child)
        self.children[parent][slot] = None
        self.parent[child] = None
        self._vacated[parent] = slot
        self.dirty_nodes.update((parent, child))

    def attach(self, child, parent, slot):
        taken = self.children[parent][slot]
        if taken is not None:
            raise ForestInvariantError(SLOT_TAKEN_ERROR.format(slot, parent, taken))
        self.children[parent][slot] = child
        self.parent[child] = parent
        self.dirty_nodes.update((parent, child))

    def take_flush(self):
        """
        Return and clear the nodes and vertices changed in this start time.
        """
        nodes = sorted(n for n in self.dirty_nodes if n in self.live)
        vertices = sorted(self.dirty_vertices)
        self.dirty_nodes = set()
        self.dirty_vertices = set()
        return nodes, vertices


def _side_anchor(state, vertex, x):
    incident = state.incident[vertex]
    i = bisect.bisect_left(incident, (x.rank,))
    top = incident[i - 1][1] if i > 0 else None
    above = incident[i][1] if i < len(incident) else None
    if top is not None:
        while state.parent[top] is not None and state.rank(state.parent[top]) < x.rank:
            top = state.parent[top]
        candidates = [c for c in (above, state.parent[top]) if c is not None]
    else:
        candidates = [above] if above is not None else []
    frontier = min(candidates, key=state.rank) if candidates else None
    return top, frontier


def find_insertion(x, state):
    """
    Locate where node ``x`` would attach in the current forest.

    Returns
    -------
    anchors: `Anchors`
    """
    if state.is_live(x.node_id):
        raise ForestInvariantError(f"Node {x.node_id} is already in the forest.")
    l, eu = _side_anchor(state, x.u, x)
    r, ev = _side_anchor(state, x.v, x)
    return Anchors(l, r, eu, ev, l is not None and l == r)


def insert_node(x, anchors, state):
    """
    Insert node ``x`` at the given anchors.

    ``l`` and ``r`` become the children of ``x``, then `merge` links ``x``
    upward and removes the lowest common ancestor if a cycle was closed.

    Returns
    -------
    removed: `int` or `None`
        Id of the node removed from the forest, if any.
    """
    if anchors.convergent:
        raise ForestInvariantError(f"Node {x.node_id} closes a cycle below itself.")
    for anchor in (anchors.l, anchors.r, anchors.eu, anchors.ev):
        if anchor is not None and not state.is_live(anchor):
            raise ForestInvariantError(ANCHOR_NOT_LIVE_ERROR.format(anchor, x.node_id))
    state._vacated = {}
    state._sides = (x.u, x.v)
    state.activate(x)
    for child, slot in ((anchors.l, LEFT), (anchors.r, RIGHT)):
        if child is not None:
            state.detach(child)
            state.attach(child, x.node_id, slot)
    return merge(x.node_id, anchors.eu, anchors.ev, state)


def merge(e, eu, ev, state):
    """
    Zip the chains above ``eu`` and ``ev`` into one chain above node ``e``.

    At every step the lower-ranked frontier becomes the parent of the chain
    built so far, taking the child slot that chain vacated.  The walk ends
    when both frontiers are exhausted (``e`` becomes a root) or meet in the
    lowest common ancestor, which is removed and whose place ``e`` takes.

    Returns
    -------
    removed: `int` or `None`
        The removed lowest common ancestor, if the chains met.
    """
    for _ in range(len(state.live) + 1):
        if eu is None and ev is None:
            state.detach(e)
            return None
        if eu == ev:
            lca = eu
            grandparent = state.parent[lca]
            slot = state.slot_of(lca)
            state.detach(e)
            state.detach(lca)
            state.remove(lca)
            if grandparent is not None:
                state.attach(e, grandparent, slot)
            return lca
        if ev is None or (eu is not None and state.rank(eu) < state.rank(ev)):
            chosen, side = eu, 0
        else:
            chosen, side = ev, 1
        if state.parent[e] != chosen:
            state.detach(e)
            slot = state._vacated.pop(chosen, None)
            if slot is None:
                slot = LEFT if state.nodes[chosen].u == state._sides[side] else RIGHT
            state.attach(e, chosen, slot)
        following = state.parent[chosen]
        if side == 0:
            eu = following
        else:
            ev = following
        e = chosen
    raise ForestInvariantError(MERGE_RUNAWAY_ERROR.format(e))
