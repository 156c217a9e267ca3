"""The security-invariant template library.

Five templates ship: ``subnets``, ``sink``, ``blp``, ``comm_partners`` (all
per-edge predicates) and ``not_comm_with`` (a transitive blacklist, checked
via reachability). Each template knows its secure default attribute, so a
partial host labeling is always completed to a total one; unlabeled hosts get
the most restrictive-for-others / least-privileged value.

Adding a template means registering one more subclass here; the synthesis
engine only sees the generic interface.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType

from .errors import ScenarioError
from .model import Edge, Entity, PolicyGraph, empty_graph, reachable

REGISTRY: dict[str, "Template"] = {}


class Kind(enum.Enum):
    """What a violated invariant means for stateful upgrades.

    IFS invariants constrain who may learn information, so answer packets
    (backflows) matter. ACS invariants constrain who may initiate access;
    backflows are tolerated as long as they cause no side effects on other
    flows.
    """

    IFS = "information-flow"
    ACS = "access-control"


class SubnetRole(enum.Enum):
    MEMBER = "member"
    INBOUND_GATEWAY = "inbound_gateway"
    UNASSIGNED = "unassigned"


class SinkRole(enum.Enum):
    SINK = "sink"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class BlpLabel:
    """Security clearance: a non-negative level plus a declassification bit.

    A trusted host may receive at any level and re-emits at level 0.
    """

    level: int = 0
    trusted: bool = False

    def __post_init__(self):
        if self.level < 0:
            raise ScenarioError("security levels must be non-negative")

    @property
    def effective_send_level(self) -> int:
        return 0 if self.trusted else self.level


@dataclass(frozen=True)
class InvariantInstance:
    """A template instantiated with scenario-specific host attributes.

    ``attrs`` is total over the scenario entities; ``declared`` is the
    partial map as written by the user, kept so interfaces can distinguish
    declared from defaulted values.
    """

    template: "Template"
    attrs: MappingProxyType
    declared: MappingProxyType
    label: str

    @property
    def kind(self) -> Kind:
        return self.template.kind

    @property
    def phi_structured(self) -> bool:
        return self.template.phi_structured

    def attr(self, entity: Entity):
        try:
            return self.attrs[entity]
        except KeyError:
            raise ScenarioError(f"entity {entity!r} has no attribute for {self.template.id}") from None


class Template:
    """Generic invariant: semantics plus attribute plumbing."""

    id: str
    kind: Kind
    phi_structured: bool

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        REGISTRY[cls.id] = cls()

    def default_attr(self):
        raise NotImplementedError

    def validate_attr(self, attr, entities, path="attrs"):
        """Reject attributes that reference undeclared entities."""

    def parse_attr(self, value, path):
        """Decode one attribute from its scenario-JSON form."""
        raise NotImplementedError

    def attr_to_json(self, attr):
        raise NotImplementedError

    def phi(self, sender, sender_attr, receiver, receiver_attr) -> bool:
        raise TypeError(f"template {self.id} is not phi-structured")

    def holds(self, instance: InvariantInstance, graph: PolicyGraph) -> bool:
        if not self.phi_structured:
            raise NotImplementedError
        return all(
            self.phi(s, instance.attr(s), r, instance.attr(r)) for s, r in graph.edges
        )

    def offending_flows(self, instance, graph) -> tuple[frozenset[Edge], ...]:
        """Candidate edge sets whose removal restores the invariant.

        Empty family iff the invariant already holds.
        """
        if not self.phi_structured:
            raise NotImplementedError
        bad = frozenset(
            e for e in graph.edges if not self.phi(e[0], instance.attr(e[0]), e[1], instance.attr(e[1]))
        )
        return (bad,) if bad else ()


class Subnets(Template):
    """Collaborating, protected host groups with an inbound gateway (DMZ).

    Unassigned (outside) hosts may not reach members directly; the gateway is
    reachable by everyone and may reach anyone.
    """

    id = "subnets"
    kind = Kind.ACS
    phi_structured = True

    def default_attr(self):
        return SubnetRole.UNASSIGNED

    def parse_attr(self, value, path):
        if value in ("member", "inbound_gateway"):
            return SubnetRole(value)
        raise ScenarioError("expected 'member' or 'inbound_gateway'", path)

    def attr_to_json(self, attr):
        return attr.value

    def phi(self, sender, sender_attr, receiver, receiver_attr):
        return not (sender_attr is SubnetRole.UNASSIGNED and receiver_attr is SubnetRole.MEMBER)


class Sink(Template):
    """An information sink must not emit data to anyone."""

    id = "sink"
    kind = Kind.IFS
    phi_structured = True

    def default_attr(self):
        return SinkRole.UNASSIGNED

    def parse_attr(self, value, path):
        if value == "sink":
            return SinkRole.SINK
        raise ScenarioError("expected 'sink'", path)

    def attr_to_json(self, attr):
        return attr.value

    def phi(self, sender, sender_attr, receiver, receiver_attr):
        return sender_attr is not SinkRole.SINK


class BellLaPadula(Template):
    """Label-based information flow: data never flows down the level order.

    A flow s -> r is allowed when the receiver is trusted or the sender's
    effective level (0 for trusted senders: they declassify) is at most the
    receiver's level.
    """

    id = "blp"
    kind = Kind.IFS
    phi_structured = True

    def default_attr(self):
        return BlpLabel(0, False)

    def parse_attr(self, value, path):
        if not isinstance(value, dict):
            raise ScenarioError("expected an object with 'level' and/or 'trusted'", path)
        unknown = set(value) - {"level", "trusted"}
        if unknown:
            raise ScenarioError(f"unknown keys {sorted(unknown)}", path)
        level = value.get("level", 0)
        trusted = value.get("trusted", False)
        if not isinstance(level, int) or isinstance(level, bool) or level < 0:
            raise ScenarioError("'level' must be a non-negative integer", path)
        if not isinstance(trusted, bool):
            raise ScenarioError("'trusted' must be a boolean", path)
        return BlpLabel(level, trusted)

    def attr_to_json(self, attr):
        return {"level": attr.level, "trusted": attr.trusted}

    def phi(self, sender, sender_attr, receiver, receiver_attr):
        return receiver_attr.trusted or sender_attr.effective_send_level <= receiver_attr.level


class CommPartners(Template):
    """Simple ACL: a master host is only reachable by its listed senders.

    The attribute is either None (don't care) or the frozen set of allowed
    senders. Outbound traffic of a master host is unrestricted.
    """

    id = "comm_partners"
    kind = Kind.ACS
    phi_structured = True

    def default_attr(self):
        return None

    def parse_attr(self, value, path):
        if not isinstance(value, dict) or set(value) != {"allowed_senders"}:
            raise ScenarioError("expected {'allowed_senders': [names]}", path)
        senders = value["allowed_senders"]
        if not isinstance(senders, list) or not all(isinstance(x, str) for x in senders):
            raise ScenarioError("'allowed_senders' must be a list of entity names", path)
        return frozenset(senders)

    def attr_to_json(self, attr):
        return None if attr is None else {"allowed_senders": sorted(attr)}

    def validate_attr(self, attr, entities, path="attrs"):
        if attr is not None:
            unknown = attr - entities
            if unknown:
                raise ScenarioError(f"allowed_senders name unknown entities {sorted(unknown)}", path)

    def phi(self, sender, sender_attr, receiver, receiver_attr):
        return receiver_attr is None or sender in receiver_attr


class NotCommWith(Template):
    """Black-listing transitive ACL: no path may lead to a forbidden target.

    Not a per-edge predicate; checked via reachability, which is why the
    synthesis engine keeps a generic fixpoint path around.
    """

    id = "not_comm_with"
    kind = Kind.ACS
    phi_structured = False

    def default_attr(self):
        return frozenset()

    def parse_attr(self, value, path):
        if not isinstance(value, dict) or set(value) != {"forbidden"}:
            raise ScenarioError("expected {'forbidden': [names]}", path)
        forbidden = value["forbidden"]
        if not isinstance(forbidden, list) or not all(isinstance(x, str) for x in forbidden):
            raise ScenarioError("'forbidden' must be a list of entity names", path)
        return frozenset(forbidden)

    def attr_to_json(self, attr):
        return {"forbidden": sorted(attr)}

    def validate_attr(self, attr, entities, path="attrs"):
        unknown = attr - entities
        if unknown:
            raise ScenarioError(f"forbidden list names unknown entities {sorted(unknown)}", path)

    def holds(self, instance, graph):
        for v in graph.nodes:
            forbidden = instance.attr(v)
            if forbidden and reachable(graph, v) & forbidden:
                return False
        return True

    def offending_flows(self, instance, graph):
        # Every edge lying on some path from a restricted host to one of its
        # forbidden targets. Sound (removal breaks all such paths), not
        # necessarily a minimal cut.
        bad: set[Edge] = set()
        for v in graph.nodes:
            targets = instance.attr(v) & reachable(graph, v)
            if not targets:
                continue
            from_v = reachable(graph, v)
            for u, w in graph.edges:
                if u != v and u not in from_v:
                    continue
                down = reachable(graph, w)
                if w in targets or down & targets:
                    bad.add((u, w))
        return (frozenset(bad),) if bad else ()


def get_template(template_id: str) -> Template:
    try:
        return REGISTRY[template_id]
    except KeyError:
        raise ScenarioError(f"unknown invariant template: {template_id!r}") from None


def auto_complete(template: Template, declared: dict, entities) -> dict:
    """Extend a partial attribute map to a total one with secure defaults."""
    entities = frozenset(entities)
    unknown = set(declared) - entities
    if unknown:
        raise ScenarioError(f"attributes declared for unknown entities {sorted(unknown)}")
    for host, attr in declared.items():
        template.validate_attr(attr, entities, path=f"attrs.{host}")
    total = {e: template.default_attr() for e in entities}
    total.update(declared)
    return total


def instantiate(template_id: str, declared: dict, entities, label: str | None = None) -> InvariantInstance:
    template = get_template(template_id)
    total = auto_complete(template, declared, entities)
    return InvariantInstance(
        template=template,
        attrs=MappingProxyType(dict(total)),
        declared=MappingProxyType(dict(declared)),
        label=label or template_id,
    )


def phi(instance: InvariantInstance, sender: Entity, receiver: Entity) -> bool:
    """Evaluate the per-edge predicate on one (sender, receiver) pair."""
    return instance.template.phi(sender, instance.attr(sender), receiver, instance.attr(receiver))


def holds(instance: InvariantInstance, graph: PolicyGraph) -> bool:
    missing = graph.nodes - set(instance.attrs)
    if missing:
        raise ScenarioError(f"graph entities missing attributes: {sorted(missing)}")
    return instance.template.holds(instance, graph)


def offending_flows(instance: InvariantInstance, graph: PolicyGraph) -> tuple[frozenset[Edge], ...]:
    missing = graph.nodes - set(instance.attrs)
    if missing:
        raise ScenarioError(f"graph entities missing attributes: {sorted(missing)}")
    return instance.template.offending_flows(instance, graph)


def check_deny_all(instance: InvariantInstance) -> bool:
    """The synthesis precondition: the invariant holds with zero edges."""
    return holds(instance, empty_graph(instance.attrs.keys()))
