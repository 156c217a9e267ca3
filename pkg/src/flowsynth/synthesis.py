"""Maximum-permissive policy construction, verification, and refinement.

Construction starts from the allow-all graph and removes edges until every
invariant holds. Per-edge (phi-structured) invariants are evaluated in one
pass; the remaining invariants go through a shrinking fixpoint loop. When
every invariant is phi-structured the result is the unique maximum-permissive
policy.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import invariants as inv
from .errors import EditError, SynthesisError
from .model import Edge, Entity, PolicyGraph, complete_graph


@dataclass(frozen=True)
class InstanceResult:
    label: str
    template: str
    holds: bool
    offending: frozenset[Edge]


@dataclass(frozen=True)
class VerificationReport:
    overall: bool
    results: tuple[InstanceResult, ...]

    def failing(self) -> tuple[InstanceResult, ...]:
        return tuple(r for r in self.results if not r.holds)


@dataclass(frozen=True)
class RefinementEdit:
    """A manual change to the policy graph: add or remove one edge."""

    op: str  # "add" | "remove"
    sender: Entity
    receiver: Entity

    def __post_init__(self):
        if self.op not in ("add", "remove"):
            raise EditError(f"unknown edit op {self.op!r}")
        if self.sender == self.receiver:
            raise EditError(f"self-loop edit on {self.sender!r} not allowed")


def verify(graph: PolicyGraph, instances) -> VerificationReport:
    """Check every invariant against the graph and collect offending edges."""
    results = []
    for instance in instances:
        family = inv.offending_flows(instance, graph)
        ok = not family
        offending = family[0] if family else frozenset()
        results.append(InstanceResult(instance.label, instance.template.id, ok, offending))
    return VerificationReport(all(r.holds for r in results), tuple(results))


def construct_policy(entities, instances) -> PolicyGraph:
    """Compute a policy satisfying every invariant, as permissive as possible.

    Precondition: every invariant holds on the deny-all policy; otherwise no
    satisfying policy exists at all and construction aborts.
    """
    for instance in instances:
        if not inv.check_deny_all(instance):
            raise SynthesisError(
                f"invariant {instance.label!r} fails on the deny-all policy; "
                "no policy can satisfy it"
            )

    graph = complete_graph(entities)
    phi_instances = [i for i in instances if i.phi_structured]
    generic_instances = [i for i in instances if not i.phi_structured]

    # One pass suffices for per-edge invariants: an edge survives iff every
    # predicate accepts it, independent of all other edges.
    if phi_instances:
        graph = graph.with_edges(
            e for e in graph.edges if all(inv.phi(i, *e) for i in phi_instances)
        )

    # Fixpoint for the rest: drop the first offending set of the first
    # failing invariant until everything holds. The edge set strictly
    # shrinks, so this terminates. Results may depend on instance order;
    # uniqueness is only guaranteed for the per-edge class.
    while generic_instances:
        failing = next(
            (i for i in generic_instances if not inv.holds(i, graph)), None
        )
        if failing is None:
            break
        family = inv.offending_flows(failing, graph)
        graph = graph.with_edges(graph.edges - family[0])
    return graph


def refine(graph: PolicyGraph, edits, instances) -> tuple[PolicyGraph, VerificationReport]:
    """Apply manual edits in order, then re-verify.

    Adds and removes are idempotent. A refinement that fails verification is
    returned with its failing report; the caller decides whether to keep it.
    """
    for edit in edits:
        for endpoint in (edit.sender, edit.receiver):
            if endpoint not in graph.nodes:
                raise EditError(f"edit references unknown entity {endpoint!r}")
        edge = (edit.sender, edit.receiver)
        graph = graph.add_edge(edge) if edit.op == "add" else graph.remove_edge(edge)
    return graph, verify(graph, instances)
