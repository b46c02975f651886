"""Label-preserving subgraph isomorphism for directed labeled multigraphs."""

from __future__ import annotations

from collections import Counter

from .graphs import Eaug


def is_subgraph(p: Eaug, g: Eaug) -> bool:
    """True iff an injective node map embeds p into g.

    The map must preserve the (kind, label, scope) node identity, edge
    direction, and edge kind. Patterns may be disconnected; every component
    must embed with a globally injective node map.
    """
    return find_embedding(p, g) is not None


def find_embedding(p: Eaug, g: Eaug):
    """Return one embedding as a pattern-id -> graph-id dict, or None."""
    if len(p.nodes) > len(g.nodes) or len(p.edges) > len(g.edges):
        return None
    if not p.nodes:
        return {}

    g_labels = Counter(n.match_label for n in g.nodes)
    p_labels = Counter(n.match_label for n in p.nodes)
    if any(g_labels[lbl] < cnt for lbl, cnt in p_labels.items()):
        return None

    candidates = {
        pn.id: [gn.id for gn in g.nodes if gn.match_label == pn.match_label] for pn in p.nodes
    }

    # Edges of g indexed by (src, dst, kind) for O(1) checks; parallel edges
    # between one ordered pair always differ in kind, so presence suffices.
    g_edge_set = {(e.src, e.dst, e.kind) for e in g.edges}
    p_adj: dict[str, list] = {n.id: [] for n in p.nodes}
    for e in p.edges:
        p_adj[e.src].append(e)
        if e.dst != e.src:
            p_adj[e.dst].append(e)

    # Order pattern nodes: rarest label first, then prefer nodes adjacent to
    # already-placed ones so edge constraints fire early.
    unordered = sorted(p.nodes, key=lambda n: (len(candidates[n.id]), n.id))
    order: list = []
    placed: set[str] = set()
    while unordered:
        pick = None
        for n in unordered:
            if any(
                (e.src in placed or e.dst in placed) for e in p_adj[n.id]
            ):
                pick = n
                break
        if pick is None:
            pick = unordered[0]
        unordered.remove(pick)
        order.append(pick)
        placed.add(pick.id)

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(pn_id: str, gn_id: str) -> bool:
        for e in p_adj[pn_id]:
            other = e.dst if e.src == pn_id else e.src
            if other not in mapping:
                continue
            if e.src == pn_id:
                src, dst = gn_id, mapping[other]
            else:
                src, dst = mapping[other], gn_id
            if e.src == e.dst:  # self loop
                src = dst = gn_id
            if (src, dst, e.kind) not in g_edge_set:
                return False
        return True

    def backtrack(depth: int) -> bool:
        if depth == len(order):
            return True
        pn = order[depth]
        for gn_id in candidates[pn.id]:
            if gn_id in used:
                continue
            if consistent(pn.id, gn_id):
                mapping[pn.id] = gn_id
                used.add(gn_id)
                if backtrack(depth + 1):
                    return True
                del mapping[pn.id]
                used.remove(gn_id)
        return False

    if backtrack(0):
        return dict(mapping)
    return None
