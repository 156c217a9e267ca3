"""Entities, directed policy graphs, and the graph utilities everything else shares.

A policy entity is just its name (a non-empty string, unique per scenario).
Edges are ordered (sender, receiver) pairs; a policy graph is irreflexive by
construction and all values are immutable after creation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import ScenarioError

Entity = str
Edge = tuple[Entity, Entity]


def canonical_edges(edges) -> list[Edge]:
    """Edges sorted lexicographically by sender name, then receiver name.

    Every serialized output uses this order so text artifacts are
    deterministic.
    """
    return sorted(edges)


def reverse_edges(edges) -> frozenset[Edge]:
    """{(r, s) for every (s, r) in the input}."""
    return frozenset((r, s) for (s, r) in edges)


@dataclass(frozen=True)
class PolicyGraph:
    """A global access-control matrix: allowed sender -> receiver flows."""

    nodes: frozenset[Entity]
    edges: frozenset[Edge]

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", frozenset(self.edges))
        for s, r in self.edges:
            if s == r:
                raise ScenarioError(f"self-loop edge ({s}, {r}) not allowed")
            if s not in self.nodes or r not in self.nodes:
                raise ScenarioError(f"edge ({s}, {r}) has endpoint outside the node set")

    def with_edges(self, edges) -> PolicyGraph:
        return PolicyGraph(self.nodes, frozenset(edges))

    def add_edge(self, edge: Edge) -> PolicyGraph:
        return self.with_edges(self.edges | {edge})

    def remove_edge(self, edge: Edge) -> PolicyGraph:
        return self.with_edges(self.edges - {edge})


@dataclass(frozen=True)
class StatefulPolicy:
    """A policy graph plus the edges whose answer packets are also allowed."""

    graph: PolicyGraph
    stateful: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "stateful", frozenset(self.stateful))
        extra = self.stateful - self.graph.edges
        if extra:
            raise ScenarioError(f"stateful edges not in the policy: {canonical_edges(extra)}")

    @property
    def backflows(self) -> frozenset[Edge]:
        """Reverse directions newly permitted by the stateful marks.

        A backflow whose direction is already a policy edge adds nothing and
        is excluded.
        """
        return reverse_edges(self.stateful) - self.graph.edges


def check_unique_names(entities) -> None:
    dupes = [n for n, c in Counter(entities).items() if c > 1]
    if dupes:
        raise ScenarioError(f"duplicate entity names: {sorted(dupes)}")
    for name in entities:
        if not name:
            raise ScenarioError("entity names must be non-empty")


def complete_graph(entities) -> PolicyGraph:
    """The allow-all policy: every ordered pair (s, r) with s != r."""
    entities = list(entities)
    if not entities:
        raise ScenarioError("at least one entity is required")
    check_unique_names(entities)
    nodes = frozenset(entities)
    return PolicyGraph(nodes, frozenset((s, r) for s in nodes for r in nodes if s != r))


def empty_graph(entities) -> PolicyGraph:
    """The deny-all policy over the given entities."""
    entities = list(entities)
    check_unique_names(entities)
    return PolicyGraph(frozenset(entities), frozenset())


def successors(graph: PolicyGraph) -> dict[Entity, set[Entity]]:
    adj: dict[Entity, set[Entity]] = {v: set() for v in graph.nodes}
    for s, r in graph.edges:
        adj[s].add(r)
    return adj


def reachable(graph: PolicyGraph, start: Entity) -> frozenset[Entity]:
    """Entities reachable from ``start`` via one or more edges.

    ``start`` itself is included only if it lies on a cycle back to itself,
    which irreflexivity makes possible only via longer cycles.
    """
    if start not in graph.nodes:
        raise ScenarioError(f"unknown entity: {start}")
    adj = successors(graph)
    seen: set[Entity] = set()
    frontier = list(adj[start])
    while frontier:
        v = frontier.pop()
        if v in seen:
            continue
        seen.add(v)
        frontier.extend(adj[v] - seen)
    return frozenset(seen)
