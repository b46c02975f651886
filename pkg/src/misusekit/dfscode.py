"""Canonical DFS codes for directed labeled multigraphs.

A DFS code is a sequence of edge tuples (i, j, Li, ek, Lj, d) where i/j are
DFS discovery indices, Li/Lj are node match-labels, ek is the edge kind, and
d is 0 when the stored edge points from the i-end to the j-end (1 otherwise).
The minimum code over all DFS traversals is a canonical form: two graphs get
the same minimum code iff they are isomorphic (respecting labels, kinds,
scopes, and edge directions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graphs import DataScope, Eaug, Edge, EdgeKind, Node, NodeKind, NodeLabel

# (i, j, Li, edge_kind, Lj, dir)
EdgeTuple = tuple[int, int, NodeLabel, str, NodeLabel, int]


class NotCanonicalizable(ValueError):
    pass


def _tuple_key(t: EdgeTuple):
    i, j, li, ek, lj, d = t
    if j < i:  # backward
        pos = (2 * i + 1, j)
    else:  # forward
        pos = (2 * j, -i)
    return (pos[0], pos[1], li, ek, lj, d)


@dataclass(frozen=True)
class DfsCode:
    """Either a sequence of edge tuples or a degenerate single-node code."""

    tuples: tuple[EdgeTuple, ...] = ()
    node_label: Optional[NodeLabel] = None

    def __post_init__(self):
        if self.node_label is None and not self.tuples:
            raise ValueError("empty DFS code")

    @property
    def is_single_node(self) -> bool:
        return self.node_label is not None

    @property
    def n_edges(self) -> int:
        return len(self.tuples)

    def sort_key(self):
        if self.is_single_node:
            return ((-1, 0, self.node_label, "", self.node_label, 0),)
        return tuple(_tuple_key(t) for t in self.tuples)

    def __lt__(self, other: "DfsCode") -> bool:
        return self.sort_key() < other.sort_key()

    def to_jsonable(self) -> dict:
        if self.is_single_node:
            return {"node": list(self.node_label)}
        return {
            "tuples": [[i, j, list(li), ek, list(lj), d] for i, j, li, ek, lj, d in self.tuples]
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "DfsCode":
        if "node" in d:
            return cls(node_label=tuple(d["node"]))
        tuples = tuple(
            (i, j, tuple(li), ek, tuple(lj), d_) for i, j, li, ek, lj, d_ in d["tuples"]
        )
        return cls(tuples=tuples)


def graph_of(code: DfsCode) -> Eaug:
    """Reconstruct a graph isomorphic to the one the code was derived from."""
    if code.is_single_node:
        kind, label, scope = code.node_label
        return Eaug([Node("0", NodeKind(kind), label, DataScope(scope))], [])
    labels: dict[int, NodeLabel] = {}
    edges: list[Edge] = []
    for i, j, li, ek, lj, d in code.tuples:
        labels.setdefault(i, li)
        labels.setdefault(j, lj)
        src, dst = (i, j) if d == 0 else (j, i)
        edges.append(Edge(str(src), str(dst), EdgeKind(ek)))
    nodes = [
        Node(str(idx), NodeKind(l[0]), l[1], DataScope(l[2])) for idx, l in sorted(labels.items())
    ]
    return Eaug(nodes, edges)


class _State:
    """A partial DFS embedding of a graph onto itself."""

    __slots__ = ("mapping", "used", "rmpath")

    def __init__(self, mapping: tuple[str, ...], used: frozenset[int], rmpath: tuple[int, ...]):
        self.mapping = mapping  # dfs index -> node id
        self.used = used  # indices into the edge list
        self.rmpath = rmpath  # dfs indices along the rightmost path


def _adjacency(g: Eaug) -> dict[str, list[tuple[int, Edge]]]:
    adj: dict[str, list[tuple[int, Edge]]] = {n.id: [] for n in g.nodes}
    for idx, e in enumerate(g.edges):
        adj[e.src].append((idx, e))
        if e.dst != e.src:
            adj[e.dst].append((idx, e))
    return adj


def _extensions(g: Eaug, labels: dict[str, NodeLabel], adj, st: _State):
    """Yield (tuple, new_state) rightmost-path extensions of a partial DFS."""
    rm_idx = st.rmpath[-1]
    rm_node = st.mapping[rm_idx]
    pos = {nid: k for k, nid in enumerate(st.mapping)}
    on_path = set(st.rmpath)
    # Backward: from the rightmost vertex to earlier rightmost-path vertices.
    for eidx, e in adj[rm_node]:
        if eidx in st.used:
            continue
        other = e.dst if e.src == rm_node else e.src
        if other not in pos:
            continue
        j = pos[other]
        if j not in on_path or j == rm_idx:
            continue
        d = 0 if e.src == rm_node else 1
        t = (rm_idx, j, labels[rm_node], e.kind.value, labels[other], d)
        yield t, _State(st.mapping, st.used | {eidx}, st.rmpath)
    # Forward: from any rightmost-path vertex to an unmapped vertex.
    new_idx = len(st.mapping)
    for path_pos, v_idx in enumerate(st.rmpath):
        v_node = st.mapping[v_idx]
        for eidx, e in adj[v_node]:
            if eidx in st.used:
                continue
            other = e.dst if e.src == v_node else e.src
            if other in pos:
                continue
            d = 0 if e.src == v_node else 1
            t = (v_idx, new_idx, labels[v_node], e.kind.value, labels[other], d)
            yield t, _State(
                st.mapping + (other,),
                st.used | {eidx},
                st.rmpath[: path_pos + 1] + (new_idx,),
            )


def _is_connected(g: Eaug) -> bool:
    if not g.nodes:
        return False
    adj = _adjacency(g)
    seen = {g.nodes[0].id}
    stack = [g.nodes[0].id]
    while stack:
        nid = stack.pop()
        for _, e in adj[nid]:
            other = e.dst if e.src == nid else e.src
            if other not in seen:
                seen.add(other)
                stack.append(other)
    return len(seen) == len(g.nodes)


def min_dfs_code(g: Eaug) -> DfsCode:
    """Compute the lexicographically minimal DFS code of a connected graph.

    Single-node graphs get a degenerate label-only code. Raises
    NotCanonicalizable for empty or disconnected inputs.
    """
    if not g.nodes or not _is_connected(g):
        raise NotCanonicalizable("not canonicalizable: graph must be connected and nonempty")
    if not g.edges:
        if len(g.nodes) != 1:
            raise NotCanonicalizable("not canonicalizable: edgeless multi-node graph")
        return DfsCode(node_label=g.nodes[0].match_label)

    labels = {n.id: n.match_label for n in g.nodes}
    adj = _adjacency(g)
    n_edges = len(g.edges)

    # Seed states: every oriented traversal of every edge.
    seeds: dict[EdgeTuple, list[_State]] = {}
    for eidx, e in enumerate(g.edges):
        for first, second, d in ((e.src, e.dst, 0), (e.dst, e.src, 1)):
            if first == second:
                continue
            t = (0, 1, labels[first], e.kind.value, labels[second], d)
            seeds.setdefault(t, []).append(
                _State((first, second), frozenset([eidx]), (0, 1))
            )

    def search(states: list[_State], depth: int) -> Optional[tuple[EdgeTuple, ...]]:
        if depth == n_edges:
            return ()
        exts: dict[EdgeTuple, list[_State]] = {}
        for st in states:
            for t, new_st in _extensions(g, labels, adj, st):
                exts.setdefault(t, []).append(new_st)
        for t in sorted(exts, key=_tuple_key):
            rest = search(exts[t], depth + 1)
            if rest is not None:
                return (t,) + rest
        return None

    for t in sorted(seeds, key=_tuple_key):
        rest = search(seeds[t], 1)
        if rest is not None:
            return DfsCode(tuples=(t,) + rest)
    raise NotCanonicalizable("no complete DFS traversal found")  # pragma: no cover
