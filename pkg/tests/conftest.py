import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from misusekit.graphs import DataScope, Eaug, Edge, EdgeKind, Node, NodeKind

NODE_KINDS = [NodeKind.ACTION, NodeKind.DATA, NodeKind.CONDITION]
EDGE_KINDS = list(EdgeKind)
LABELS = ["get", "put", "open", "close", "check", "log", "flush"]


def random_eaug(
    rng: random.Random,
    max_nodes: int = 5,
    max_edges: int = 6,
    connected: bool = False,
    labels=None,
) -> Eaug:
    """Random valid EAUG; optionally guaranteed connected."""
    labels = labels or LABELS
    n = rng.randint(1 if not connected else 2, max_nodes)
    nodes = [
        Node(
            id=f"n{i}",
            kind=rng.choice(NODE_KINDS),
            label=rng.choice(labels),
        )
        for i in range(n)
    ]
    edges = []
    seen = set()
    if connected:
        order = list(range(n))
        rng.shuffle(order)
        for prev, cur in zip(order, order[1:]):
            kind = rng.choice(EDGE_KINDS)
            src, dst = (f"n{prev}", f"n{cur}") if rng.random() < 0.5 else (f"n{cur}", f"n{prev}")
            edges.append(Edge(src, dst, kind))
            seen.add((src, dst, kind))
    target = rng.randint(0 if not connected else len(edges), max_edges)
    for _ in range(30):
        if len(edges) >= target:
            break
        a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if a == b:
            continue
        kind = rng.choice(EDGE_KINDS)
        key = (f"n{a}", f"n{b}", kind)
        if key in seen:
            continue
        seen.add(key)
        edges.append(Edge(*key))
    return Eaug(nodes, edges)


def permute_nodes(g: Eaug, rng: random.Random) -> Eaug:
    """Relabel node ids and shuffle node/edge order; an isomorphic copy."""
    ids = [n.id for n in g.nodes]
    new_ids = [f"m{i}" for i in range(len(ids))]
    rng.shuffle(new_ids)
    remap = dict(zip(ids, new_ids))
    nodes = [Node(remap[n.id], n.kind, n.label, n.scope) for n in g.nodes]
    edges = [Edge(remap[e.src], remap[e.dst], e.kind) for e in g.edges]
    rng.shuffle(nodes)
    rng.shuffle(edges)
    return Eaug(nodes, edges)


@pytest.fixture
def rng():
    return random.Random(12345)
