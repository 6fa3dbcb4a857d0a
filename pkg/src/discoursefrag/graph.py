"""Per-day interaction graphs.

Each labeled post contributes a sender persona ``(user, category)``; a user
posting in two categories the same day gets two sender personas.
Interaction targets resolve to the target user's sender persona when that
user has exactly one persona that day, otherwise to an on-demand receiver
persona, which never carries a category. Edges are stored directed
(sender to target) but every connectivity computation and metric treats
them as undirected.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

from .ingest import EventPartition

EDGE_KINDS = ("reply", "retweet", "mention")


@dataclass(frozen=True)
class PersonaNode:
    """A user in one role: labeled sender or unlabeled receiver."""

    user_id: str
    category: str | None = None

    @property
    def kind(self) -> str:
        return "sender" if self.category is not None else "receiver"

    @property
    def key(self) -> str:
        return f"{self.user_id}|{self.category or ''}"


def persona_sort_key(node: PersonaNode) -> tuple[str, str]:
    return (node.user_id, node.category or "")


@dataclass(frozen=True)
class InteractionEdge:
    """One interaction (reply, retweet, or mention) from a labeled post."""

    sender: PersonaNode
    target: PersonaNode
    kind: str
    post_id: str

    def __post_init__(self):
        if self.sender.category is None:
            raise ValueError("edges must originate from a sender persona")
        if self.sender.user_id == self.target.user_id:
            raise ValueError("self-loops are forbidden")
        if self.kind not in EDGE_KINDS:
            raise ValueError(f"unknown edge kind {self.kind!r}")


@dataclass(frozen=True)
class DailyGraph:
    """One day's interaction graph for one (area, event) partition.

    Unfiltered graphs may hold isolated personas and several components;
    after ``filter_graph`` the graph is connected with no degree-0 nodes.
    """

    day: dt.date
    area: str
    event: str
    provenance: str
    nodes: frozenset[PersonaNode]
    edges: tuple[InteractionEdge, ...]

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    def sender_nodes(self) -> list[PersonaNode]:
        return sorted((n for n in self.nodes if n.category is not None), key=persona_sort_key)

    def receiver_nodes(self) -> list[PersonaNode]:
        return sorted((n for n in self.nodes if n.category is None), key=persona_sort_key)

    def undirected_adjacency(self) -> dict[PersonaNode, set[PersonaNode]]:
        """Neighbor sets, parallel edges collapsed."""
        adj: dict[PersonaNode, set[PersonaNode]] = {n: set() for n in self.nodes}
        for e in self.edges:
            adj[e.sender].add(e.target)
            adj[e.target].add(e.sender)
        return adj

    def simple_edges(self) -> list[tuple[PersonaNode, PersonaNode]]:
        """Deduplicated undirected edges, endpoints in sorted order."""
        pairs = {tuple(sorted((e.sender, e.target), key=persona_sort_key)) for e in self.edges}
        return sorted(pairs, key=lambda p: (persona_sort_key(p[0]), persona_sort_key(p[1])))

    def simple_sender_edges(self) -> list[tuple[PersonaNode, PersonaNode]]:
        """Deduplicated undirected edges whose both endpoints are senders."""
        return [(a, b) for a, b in self.simple_edges()
                if a.category is not None and b.category is not None]


@dataclass(frozen=True)
class Projection:
    """Undirected co-engagement graph over one category's sender personas.

    Two personas are linked when they interact directly or share an
    interaction neighbor on the same day.
    """

    category: str
    vertices: tuple[PersonaNode, ...]
    adjacency: Mapping[PersonaNode, frozenset[PersonaNode]]

    def edge_list(self) -> list[tuple[PersonaNode, PersonaNode]]:
        pairs = set()
        for v, neighbors in self.adjacency.items():
            for w in neighbors:
                pairs.add(tuple(sorted((v, w), key=persona_sort_key)))
        return sorted(pairs, key=lambda p: (persona_sort_key(p[0]), persona_sort_key(p[1])))


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, items: Iterable[Hashable]):
        self._parent = {x: x for x in items}
        self._size = {x: 1 for x in self._parent}

    def find(self, x: Hashable) -> Hashable:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, a: Hashable, b: Hashable) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def components(self) -> list[set]:
        groups: dict[Hashable, set] = {}
        for x in self._parent:
            groups.setdefault(self.find(x), set()).add(x)
        return list(groups.values())


def connected_components(nodes: Iterable[Hashable],
                         edges: Iterable[tuple[Hashable, Hashable]],
                         key: Callable[[Hashable], object] | None = None) -> list[set]:
    """Partition nodes into connected components (edges read as undirected).

    Components come back largest first; ties order by their smallest
    member under ``key`` (identity by default).
    """
    key = key or (lambda x: x)
    uf = UnionFind(nodes)
    for a, b in edges:
        uf.union(a, b)
    comps = uf.components()
    comps.sort(key=lambda c: (-len(c), min(key(x) for x in c)))
    return comps


def build_day_graph(partition: EventPartition, day: dt.date) -> DailyGraph:
    """Unfiltered interaction graph over the partition's posts of one day."""
    if not partition.window.contains(day):
        raise ValueError(f"{day.isoformat()} is outside the window "
                         f"[{partition.window.start}, {partition.window.end}]")
    todays = [p for p in partition.posts if p.day == day]

    categories_by_user: dict[str, set[str]] = {}
    for p in todays:
        categories_by_user.setdefault(p.user_id, set()).add(p.label)

    nodes: set[PersonaNode] = {
        PersonaNode(user, cat)
        for user, cats in categories_by_user.items() for cat in cats
    }
    receivers: dict[str, PersonaNode] = {}
    edges: list[InteractionEdge] = []
    for p in todays:
        sender = PersonaNode(p.user_id, p.label)
        for kind, target_user in p.interaction_targets():
            if target_user == p.user_id:
                continue
            target_cats = categories_by_user.get(target_user)
            if target_cats is not None and len(target_cats) == 1:
                target = PersonaNode(target_user, next(iter(target_cats)))
            else:
                target = receivers.setdefault(target_user, PersonaNode(target_user, None))
            edges.append(InteractionEdge(sender, target, kind, p.id))
    nodes.update(receivers.values())
    return DailyGraph(day=day, area=partition.area.name,
                      event=partition.window.event_name,
                      provenance=partition.provenance,
                      nodes=frozenset(nodes), edges=tuple(edges))


def _empty_like(g: DailyGraph) -> DailyGraph:
    return DailyGraph(day=g.day, area=g.area, event=g.event,
                      provenance=g.provenance, nodes=frozenset(), edges=())


def filter_graph(g: DailyGraph) -> DailyGraph:
    """Drop non-interacting personas and keep the largest component.

    Pipeline: remove degree-0 nodes, remove receiver personas left with no
    neighbors, then keep the single largest connected component. Size ties
    go to the component with more sender personas, then to the one holding
    the lexicographically smallest user id. A graph that empties out is
    returned as a valid empty DailyGraph.
    """
    adj = g.undirected_adjacency()
    keep = {n for n in g.nodes if adj[n]}
    keep = {n for n in keep
            if n.category is not None or any(m in keep for m in adj[n])}
    if not keep:
        return _empty_like(g)
    pairs = [(e.sender, e.target) for e in g.edges
             if e.sender in keep and e.target in keep]
    comps = connected_components(keep, pairs, key=persona_sort_key)
    best = min(comps, key=lambda c: (
        -len(c),
        -sum(1 for n in c if n.category is not None),
        min(n.user_id for n in c),
    ))
    edges = tuple(e for e in g.edges if e.sender in best and e.target in best)
    return DailyGraph(day=g.day, area=g.area, event=g.event,
                      provenance=g.provenance,
                      nodes=frozenset(best), edges=edges)


def co_engagement_projection(g: DailyGraph, category: str,
                             categories=None) -> Projection:
    """Link same-category senders that interact or share a neighbor.

    Vertices are all sender personas of the category present in ``g``;
    an edge joins two of them when an interaction edge connects them
    directly (either direction) or both touch a common third persona.
    """
    if categories is not None and category not in categories:
        raise ValueError(f"category {category!r} not in the category set")
    adj = g.undirected_adjacency()
    vertices = [n for n in g.sender_nodes() if n.category == category]
    vertex_set = set(vertices)
    proj: dict[PersonaNode, set[PersonaNode]] = {v: set() for v in vertices}
    for v in vertices:
        for w in adj[v]:
            if w in vertex_set and w != v:
                proj[v].add(w)
                proj[w].add(v)
    for hub in g.nodes:
        touching = [x for x in adj[hub] if x in vertex_set]
        if len(touching) < 2:
            continue
        touching.sort(key=persona_sort_key)
        for i, p in enumerate(touching):
            for q in touching[i + 1:]:
                proj[p].add(q)
                proj[q].add(p)
    return Projection(category=category, vertices=tuple(vertices),
                      adjacency={v: frozenset(ns) for v, ns in proj.items()})


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def graph_to_json(g: DailyGraph) -> str:
    """Canonical JSON for a DailyGraph (stable node order, edge order kept)."""
    nodes = sorted(g.nodes, key=persona_sort_key)
    doc = {
        "day": g.day.isoformat(),
        "area": g.area,
        "event": g.event,
        "provenance": g.provenance,
        "nodes": [{"user_id": n.user_id, "category": n.category, "kind": n.kind}
                  for n in nodes],
        "edges": [{"from": e.sender.key, "to": e.target.key,
                   "kind": e.kind, "post_id": e.post_id}
                  for e in g.edges],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(g: DailyGraph, colors: Mapping[str, str],
                 receiver_color: str = "#999999") -> str:
    """DOT rendering: senders filled with their category color, receivers gray."""
    lines = [f"graph {_dot_quote(g.day.isoformat())} {{",
             "  node [style=filled];"]
    for n in sorted(g.nodes, key=persona_sort_key):
        if n.category is None:
            color = receiver_color
        else:
            if n.category not in colors:
                raise ValueError(f"no color configured for category {n.category!r}")
            color = colors[n.category]
        lines.append(f"  {_dot_quote(n.key)} [fillcolor={_dot_quote(color)}];")
    for e in g.edges:
        lines.append(f"  {_dot_quote(e.sender.key)} -- {_dot_quote(e.target.key)} "
                     f"[label={_dot_quote(e.kind)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
