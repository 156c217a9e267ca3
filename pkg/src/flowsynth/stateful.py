"""Upgrading a security policy to a stateful policy.

A stateful edge additionally permits answer packets in the reverse direction.
Those backflows must not break anything, under two criteria:

1. no information-flow violation: every IFS invariant still holds on the
   graph extended with the backflows;
2. no access-control side effects: ACS invariants may be violated by the
   backflows themselves (answers to requests are allowed) but never by any
   original edge.

For per-edge (phi-structured) invariants a single pass decides each candidate
independently. The exponential subset enumeration the criteria literally ask
for is kept as a testing oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import invariants as inv
from .errors import OracleError, SynthesisError
from .invariants import Kind
from .model import Edge, PolicyGraph, StatefulPolicy, canonical_edges
from .synthesis import verify

CRIT_FLOW = "no-information-flow-violation"
CRIT_SIDE_EFFECT = "no-access-control-side-effects"


@dataclass(frozen=True)
class CriterionResult:
    label: str
    template: str
    criterion: str
    ok: bool
    offending: frozenset[Edge]


@dataclass(frozen=True)
class StatefulReport:
    overall: bool
    results: tuple[CriterionResult, ...]

    def failing(self) -> tuple[CriterionResult, ...]:
        return tuple(r for r in self.results if not r.ok)


def verify_stateful(sp: StatefulPolicy, instances) -> StatefulReport:
    """Check both consistency criteria for every invariant instance."""
    backflows = sp.backflows
    extended = PolicyGraph(sp.graph.nodes, sp.graph.edges | backflows)
    results = []
    for instance in instances:
        family = inv.offending_flows(instance, extended)
        offending = frozenset().union(*family) if family else frozenset()
        if instance.kind is Kind.IFS:
            results.append(
                CriterionResult(instance.label, instance.template.id, CRIT_FLOW, not offending, offending)
            )
        else:
            # Only violations reaching beyond the new backflows count.
            side_effects = offending - backflows
            results.append(
                CriterionResult(
                    instance.label, instance.template.id, CRIT_SIDE_EFFECT,
                    not side_effects, side_effects,
                )
            )
    return StatefulReport(all(r.ok for r in results), tuple(results))


def stateful_candidates(graph: PolicyGraph) -> list[Edge]:
    """Edges worth marking: those whose reverse is not already allowed.

    If the reverse direction is a policy edge of its own, answers already
    flow and a stateful mark adds nothing.
    """
    return [e for e in canonical_edges(graph.edges) if (e[1], e[0]) not in graph.edges]


def compute_stateful(graph: PolicyGraph, instances, preferences=None) -> StatefulPolicy:
    """Mark as many edges stateful as the two criteria admit.

    With only phi-structured invariants each candidate is decided
    independently (one pass, unique maximum). Otherwise a greedy pass over
    the candidates keeps an edge iff the full check still succeeds;
    ``preferences`` lists edges to try first, which can steer which of
    several maximal solutions is found.
    """
    report = verify(graph, instances)
    if not report.overall:
        failing = ", ".join(r.label for r in report.failing())
        raise SynthesisError(f"policy fails verification ({failing}); fix it before the stateful step")

    candidates = stateful_candidates(graph)
    instances = list(instances)
    if all(i.phi_structured for i in instances):
        ifs = [i for i in instances if i.kind is Kind.IFS]
        marked = frozenset(
            (s, r) for s, r in candidates if all(inv.phi(i, r, s) for i in ifs)
        )
        return StatefulPolicy(graph, marked)

    if preferences:
        preferred = [e for e in preferences if e in set(candidates)]
        rest = [e for e in candidates if e not in set(preferred)]
        candidates = preferred + rest
    chosen: set[Edge] = set()
    for edge in candidates:
        attempt = chosen | {edge}
        if verify_stateful(StatefulPolicy(graph, frozenset(attempt)), instances).overall:
            chosen = attempt
    return StatefulPolicy(graph, frozenset(chosen))


def brute_force_stateful_oracle(graph: PolicyGraph, instances, max_edges: int = 12) -> frozenset[frozenset[Edge]]:
    """Enumerate every subset of candidate edges; return the maximal valid ones.

    Deliberately exponential; guarded so tests cannot accidentally explode.
    """
    candidates = stateful_candidates(graph)
    if len(candidates) > max_edges:
        raise OracleError(
            f"{len(candidates)} candidate edges exceed the oracle guard of {max_edges}"
        )
    valid = [
        frozenset(subset)
        for k in range(len(candidates) + 1)
        for subset in combinations(candidates, k)
        if verify_stateful(StatefulPolicy(graph, frozenset(subset)), instances).overall
    ]
    return frozenset(
        s for s in valid if not any(s < other for other in valid)
    )
