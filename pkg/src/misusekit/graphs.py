"""Extended API usage graphs: node/edge vocabulary, validation, context extensions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional


class NodeKind(str, Enum):
    ACTION = "action"
    DATA = "data"
    CONDITION = "condition"
    METHOD_ENTRY = "method_entry"


class DataScope(str, Enum):
    LOCAL = "local"
    FIELD = "field"
    PARAM = "param"
    NONE = "none"


class EdgeKind(str, Enum):
    RECV = "recv"
    PARAM = "param"
    DEF = "def"
    ORDER = "order"
    SEL = "sel"
    SYNC = "sync"
    THROW = "throw"
    HANDLE = "handle"


# Matching identity of a node: kind, label string, and scope all participate,
# so "param:PrintWriter" and a local PrintWriter are distinct vertices.
NodeLabel = tuple[str, str, str]


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    label: str
    scope: DataScope = DataScope.NONE

    @property
    def match_label(self) -> NodeLabel:
        return (self.kind.value, self.label, self.scope.value)

    def render(self) -> str:
        if self.scope in (DataScope.FIELD, DataScope.PARAM):
            return f"{self.scope.value}:{self.label}"
        return self.label


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind


@dataclass(frozen=True)
class Eaug:
    """A directed labeled multigraph of one API usage.

    Immutable after construction; all operations on it are pure.
    """

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]

    def __init__(self, nodes: Iterable[Node] = (), edges: Iterable[Edge] = ()):
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"id": n.id, "kind": n.kind.value, "label": n.label, "scope": n.scope.value}
                for n in self.nodes
            ],
            "edges": [{"src": e.src, "dst": e.dst, "kind": e.kind.value} for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Eaug":
        _reject_unknown(d, {"nodes", "edges"}, "graph")
        nodes = []
        for nd in d.get("nodes", []):
            _reject_unknown(nd, {"id", "kind", "label", "scope"}, "node")
            nodes.append(
                Node(
                    id=str(nd["id"]),
                    kind=NodeKind(nd["kind"]),
                    label=str(nd["label"]),
                    scope=DataScope(nd.get("scope", "none")),
                )
            )
        edges = []
        for ed in d.get("edges", []):
            _reject_unknown(ed, {"src", "dst", "kind"}, "edge")
            edges.append(Edge(src=str(ed["src"]), dst=str(ed["dst"]), kind=EdgeKind(ed["kind"])))
        return cls(nodes, edges)


@dataclass(frozen=True)
class EaugContext:
    """Extra method context folded into the graph before mining."""

    supertypes: tuple[str, ...] = ()
    initializer_graphs: tuple[Eaug, ...] = ()
    param_names: frozenset[str] = frozenset()
    field_names: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "supertypes": list(self.supertypes),
            "initializer_graphs": [g.to_dict() for g in self.initializer_graphs],
            "param_names": sorted(self.param_names),
            "field_names": sorted(self.field_names),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EaugContext":
        _reject_unknown(
            d, {"supertypes", "initializer_graphs", "param_names", "field_names"}, "context"
        )
        return cls(
            supertypes=tuple(d.get("supertypes", [])),
            initializer_graphs=tuple(Eaug.from_dict(g) for g in d.get("initializer_graphs", [])),
            param_names=frozenset(d.get("param_names", [])),
            field_names=frozenset(d.get("field_names", [])),
        )


class SchemaError(ValueError):
    """Raised on malformed serialized graphs/corpora."""


def _reject_unknown(d: dict, allowed: set[str], what: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise SchemaError(f"unknown {what} fields: {sorted(unknown)}")


def validate_graph(g: Eaug) -> list[str]:
    """Return all invariant violations; an empty list means the graph is valid."""
    violations: list[str] = []
    seen: set[str] = set()
    for n in g.nodes:
        if n.id in seen:
            violations.append(f"duplicate node id {n.id!r}")
        seen.add(n.id)
        if n.scope != DataScope.NONE and n.kind != NodeKind.DATA:
            violations.append(f"node {n.id!r} has scope {n.scope.value} but is not a data node")
    ids = {n.id for n in g.nodes}
    for e in g.edges:
        if e.src not in ids or e.dst not in ids:
            violations.append(f"dangling edge {e.src!r}->{e.dst!r}")
    pair_kinds: set[tuple[str, str, EdgeKind]] = set()
    for e in g.edges:
        key = (e.src, e.dst, e.kind)
        if key in pair_kinds:
            violations.append(f"duplicate parallel edge {e.src!r}->{e.dst!r} ({e.kind.value})")
        pair_kinds.add(key)
    entries = [n for n in g.nodes if n.kind == NodeKind.METHOD_ENTRY]
    if len(entries) > 1:
        violations.append("multiple entries")
    entry_ids = {n.id for n in entries}
    for n in g.nodes:
        if n.kind == NodeKind.DATA and n.id.startswith("__supertype__"):
            ok = any(
                (e.src == n.id and e.dst in entry_ids) or (e.dst == n.id and e.src in entry_ids)
                for e in g.edges
            )
            if not ok:
                violations.append(f"supertype node {n.id!r} not connected to method entry")
    return violations


class InvalidGraphError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _source_actions(g: Eaug) -> list[Node]:
    """Action nodes with no incoming order edge from another action."""
    actions = [n for n in g.nodes if n.kind == NodeKind.ACTION]
    action_ids = {n.id for n in actions}
    has_pred = {
        e.dst for e in g.edges if e.kind == EdgeKind.ORDER and e.src in action_ids
    }
    return [n for n in actions if n.id not in has_pred]


def _sink_actions(g: Eaug) -> list[Node]:
    actions = [n for n in g.nodes if n.kind == NodeKind.ACTION]
    action_ids = {n.id for n in actions}
    has_succ = {
        e.src for e in g.edges if e.kind == EdgeKind.ORDER and e.dst in action_ids
    }
    return [n for n in actions if n.id not in has_succ]


def apply_eaug_extensions(g: Eaug, ctx: EaugContext) -> Eaug:
    """Fold method context into the usage graph.

    Data nodes named as params/fields get their scope set, each supertype
    becomes a data node order-linked to the method entry, and initializer
    graphs are merged with order edges placing them before the method's
    first actions. Idempotent for a fixed ctx.
    """
    violations = validate_graph(g)
    if violations:
        raise InvalidGraphError(violations)

    nodes = list(g.nodes)
    edges = list(g.edges)

    for i, n in enumerate(nodes):
        if n.kind != NodeKind.DATA:
            continue
        if n.label in ctx.param_names or n.id in ctx.param_names:
            nodes[i] = replace(n, scope=DataScope.PARAM)
        elif n.label in ctx.field_names or n.id in ctx.field_names:
            nodes[i] = replace(n, scope=DataScope.FIELD)

    entry = next((n for n in nodes if n.kind == NodeKind.METHOD_ENTRY), None)
    if ctx.supertypes and entry is None:
        entry = Node(id="__entry__", kind=NodeKind.METHOD_ENTRY, label="<entry>")
        nodes.append(entry)
    existing_ids = {n.id for n in nodes}
    for st in ctx.supertypes:
        node_id = f"__supertype__{st}"
        if node_id in existing_ids:
            continue  # already applied
        nodes.append(Node(id=node_id, kind=NodeKind.DATA, label=st))
        edges.append(Edge(src=node_id, dst=entry.id, kind=EdgeKind.ORDER))
        existing_ids.add(node_id)

    base_sources = _source_actions(g)
    for idx, init in enumerate(ctx.initializer_graphs):
        prefix = f"__init{idx}__"
        if any(n.id.startswith(prefix) for n in nodes):
            continue  # already merged
        remap = {n.id: prefix + n.id for n in init.nodes}
        for n in init.nodes:
            nodes.append(replace(n, id=remap[n.id]))
        for e in init.edges:
            edges.append(Edge(src=remap[e.src], dst=remap[e.dst], kind=e.kind))
        # Initializations execute before the method body: order every
        # initializer sink action before every first action of the method.
        for sink in _sink_actions(init):
            for src in base_sources:
                edges.append(Edge(src=remap[sink.id], dst=src.id, kind=EdgeKind.ORDER))

    return Eaug(nodes, edges)
