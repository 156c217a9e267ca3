"""Shared fixtures and scenario generators for the test suite."""

from __future__ import annotations

import random
from itertools import combinations
from pathlib import Path

import pytest

from flowsynth import (
    PolicyGraph,
    case_study,
    instantiate,
)
from flowsynth import invariants as inv

FIXTURES = Path(__file__).parent / "fixtures"

CASE_ENTITIES = ("INET", "WebApp", "WebFrnt", "DB", "Log")

CASE_POLICY_EDGES = frozenset({
    ("WebFrnt", "Log"), ("WebFrnt", "WebApp"), ("WebFrnt", "INET"),
    ("DB", "Log"), ("DB", "WebApp"),
    ("WebApp", "WebFrnt"), ("WebApp", "DB"), ("WebApp", "Log"), ("WebApp", "INET"),
    ("INET", "WebFrnt"),
})

CASE_REFINED_EDGES = CASE_POLICY_EDGES - {("WebFrnt", "INET")}

CASE_STATEFUL = frozenset({("WebApp", "INET"), ("INET", "WebFrnt")})


def case_study_instances():
    return case_study().instantiate()


@pytest.fixture
def case_instances():
    return case_study_instances()


@pytest.fixture
def case_scenario():
    return case_study()


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


# -- random scenario generation -------------------------------------------

def random_entities(rng: random.Random, max_n: int = 6, min_n: int = 2):
    return [f"H{i}" for i in range(rng.randint(min_n, max_n))]


def random_phi_instances(rng: random.Random, entities):
    """One instance of each per-edge template with random attributes."""
    instances = []

    subnets = {}
    for e in entities:
        role = rng.choice(["member", "inbound_gateway", None, None])
        if role:
            subnets[e] = inv.SubnetRole(role)
    instances.append(instantiate("subnets", subnets, entities))

    sinks = {e: inv.SinkRole.SINK for e in entities if rng.random() < 0.25}
    instances.append(instantiate("sink", sinks, entities))

    blp = {}
    for e in entities:
        if rng.random() < 0.7:
            blp[e] = inv.BlpLabel(rng.randint(0, 2), rng.random() < 0.2)
    instances.append(instantiate("blp", blp, entities))

    acls = {}
    for e in entities:
        if rng.random() < 0.3:
            allowed = frozenset(x for x in entities if x != e and rng.random() < 0.5)
            acls[e] = allowed
    instances.append(instantiate("comm_partners", acls, entities))
    return instances


def random_not_comm_with(rng: random.Random, entities):
    forbidden = {}
    for e in entities:
        if rng.random() < 0.3:
            targets = frozenset(x for x in entities if x != e and rng.random() < 0.4)
            if targets:
                forbidden[e] = targets
    return instantiate("not_comm_with", forbidden, entities)


def random_graph(rng: random.Random, entities) -> PolicyGraph:
    pairs = [(s, r) for s in entities for r in entities if s != r]
    edges = frozenset(e for e in pairs if rng.random() < 0.5)
    return PolicyGraph(frozenset(entities), edges)


# -- independent oracles ---------------------------------------------------

def closure_matrix(graph: PolicyGraph) -> dict:
    """Transitive closure by repeated squaring of the adjacency relation."""
    names = sorted(graph.nodes)
    reach = {(a, b): (a, b) in graph.edges for a in names for b in names}
    changed = True
    while changed:
        changed = False
        for a in names:
            for b in names:
                if not reach[(a, b)]:
                    if any(reach[(a, k)] and reach[(k, b)] for k in names):
                        reach[(a, b)] = True
                        changed = True
    return reach


def enumerate_max_policy(entities, instances) -> frozenset | None:
    """Maximal satisfying edge set by brute-force subset enumeration.

    Returns None when no unique maximum exists.
    """
    pairs = [(s, r) for s in sorted(entities) for r in sorted(entities) if s != r]
    nodes = frozenset(entities)
    best = []
    for k in range(len(pairs), -1, -1):
        for subset in combinations(pairs, k):
            g = PolicyGraph(nodes, frozenset(subset))
            if all(inv.holds(i, g) for i in instances):
                best.append(frozenset(subset))
        if best:
            break
    return best[0] if len(best) == 1 else None
