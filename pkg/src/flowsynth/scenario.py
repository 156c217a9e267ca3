"""Scenario files and the end-to-end pipeline.

A scenario is a JSON document naming the entities, the invariant instances
(with partial attribute maps; auto-completion happens at instantiation so
interfaces can tell declared from defaulted values), an optional deployment
map, optional manual refinements, and optional stateful preferences.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from . import backends, invariants as inv, stateful as st, synthesis as syn
from .backends import DeploymentMap, EntityBinding
from .errors import ScenarioError, SerializationError
from .model import Edge, Entity, PolicyGraph, StatefulPolicy
from .synthesis import RefinementEdit, VerificationReport

_NAME_RE = re.compile(r"^\w+$")

_TOP_KEYS = {"entities", "invariants", "deployment", "refinements", "stateful_preferences"}
_DEPLOY_KEYS = {"ipv4", "mac", "port", "iface", "external"}


@dataclass(frozen=True)
class InvariantSpec:
    """One invariant as written in the scenario: template id + declared attrs."""

    template: str
    declared: dict
    label: str


@dataclass(frozen=True)
class Scenario:
    entities: tuple[Entity, ...]
    invariants: tuple[InvariantSpec, ...] = ()
    deployment: DeploymentMap | None = None
    refinements: tuple[RefinementEdit, ...] = ()
    stateful_preferences: tuple[Edge, ...] = ()

    def instantiate(self) -> list[inv.InvariantInstance]:
        return [
            inv.instantiate(spec.template, spec.declared, self.entities, label=spec.label)
            for spec in self.invariants
        ]


def _require(condition, message, path):
    if not condition:
        raise ScenarioError(message, path)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario JSON document.

    Errors carry a path into the document (e.g. ``invariants[1].attrs.DB``).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be an object", "$")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown keys {sorted(unknown)}", "$")

    entities = doc.get("entities")
    _require(isinstance(entities, list) and entities, "non-empty 'entities' list required", "entities")
    for i, name in enumerate(entities):
        _require(isinstance(name, str) and _NAME_RE.match(name or " "),
                 f"bad entity name {name!r} (word characters only)", f"entities[{i}]")
    _require(len(set(entities)) == len(entities), "duplicate entity names", "entities")
    known = set(entities)

    specs = []
    for i, item in enumerate(doc.get("invariants", [])):
        path = f"invariants[{i}]"
        _require(isinstance(item, dict), "invariant must be an object", path)
        unknown = set(item) - {"template", "label", "attrs"}
        _require(not unknown, f"unknown keys {sorted(unknown)}", path)
        template_id = item.get("template")
        _require(template_id in inv.REGISTRY,
                 f"unknown template {template_id!r} (have {sorted(inv.REGISTRY)})", f"{path}.template")
        template = inv.REGISTRY[template_id]
        attrs = item.get("attrs", {})
        _require(isinstance(attrs, dict), "'attrs' must be an object", f"{path}.attrs")
        declared = {}
        for host, value in attrs.items():
            attr_path = f"{path}.attrs.{host}"
            _require(host in known, f"unknown entity {host!r}", attr_path)
            parsed = template.parse_attr(value, attr_path)
            try:
                template.validate_attr(parsed, known, attr_path)
            except ScenarioError:
                raise
            declared[host] = parsed
        label = item.get("label") or f"{template_id}#{i}"
        _require(isinstance(label, str), "'label' must be a string", f"{path}.label")
        specs.append(InvariantSpec(template_id, declared, label))

    deployment = None
    if "deployment" in doc:
        _require(isinstance(doc["deployment"], dict), "'deployment' must be an object", "deployment")
        bindings = {}
        for host, rec in doc["deployment"].items():
            path = f"deployment.{host}"
            _require(host in known, f"unknown entity {host!r}", path)
            _require(isinstance(rec, dict), "deployment record must be an object", path)
            unknown = set(rec) - _DEPLOY_KEYS
            _require(not unknown, f"unknown keys {sorted(unknown)}", path)
            try:
                bindings[host] = EntityBinding(
                    ipv4=rec.get("ipv4"),
                    mac=rec.get("mac"),
                    switch_port=rec.get("port"),
                    iface=rec.get("iface"),
                    external=rec.get("external", False),
                )
            except ScenarioError as exc:
                raise ScenarioError(str(exc), path) from None
        try:
            deployment = DeploymentMap(bindings)
        except ScenarioError as exc:
            raise ScenarioError(str(exc), "deployment") from None

    def parse_edge(item, path) -> Edge:
        _require(isinstance(item, dict), "expected an object with 'from' and 'to'", path)
        for key in ("from", "to"):
            _require(item.get(key) in known, f"unknown entity {item.get(key)!r}", f"{path}.{key}")
        return (item["from"], item["to"])

    refinements = []
    for i, item in enumerate(doc.get("refinements", [])):
        path = f"refinements[{i}]"
        _require(isinstance(item, dict), "refinement must be an object", path)
        _require(item.get("op") in ("add", "remove"), "op must be 'add' or 'remove'", f"{path}.op")
        edge = parse_edge(item, path)
        _require(edge[0] != edge[1], "self-loop refinement not allowed", path)
        refinements.append(RefinementEdit(item["op"], *edge))

    preferences = tuple(
        parse_edge(item, f"stateful_preferences[{i}]")
        for i, item in enumerate(doc.get("stateful_preferences", []))
    )

    return Scenario(tuple(entities), tuple(specs), deployment, tuple(refinements), preferences)


def emit_scenario(scenario: Scenario) -> str:
    """Serialize a scenario back to its JSON form (round-trips with parse)."""
    doc: dict = {"entities": list(scenario.entities)}
    if scenario.invariants:
        doc["invariants"] = [
            {
                "template": spec.template,
                "label": spec.label,
                "attrs": {
                    host: inv.REGISTRY[spec.template].attr_to_json(attr)
                    for host, attr in sorted(spec.declared.items())
                },
            }
            for spec in scenario.invariants
        ]
    if scenario.deployment is not None:
        doc["deployment"] = {}
        for host in sorted(scenario.deployment.bindings):
            b = scenario.deployment.bindings[host]
            rec = {}
            if b.ipv4 is not None:
                rec["ipv4"] = b.ipv4
            if b.mac is not None:
                rec["mac"] = b.mac
            if b.switch_port is not None:
                rec["port"] = b.switch_port
            if b.iface is not None:
                rec["iface"] = b.iface
            if b.external:
                rec["external"] = True
            doc["deployment"][host] = rec
    if scenario.refinements:
        doc["refinements"] = [
            {"op": e.op, "from": e.sender, "to": e.receiver} for e in scenario.refinements
        ]
    if scenario.stateful_preferences:
        doc["stateful_preferences"] = [
            {"from": s, "to": r} for s, r in scenario.stateful_preferences
        ]
    return json.dumps(doc, indent=2) + "\n"


FORCED_WARNING = (
    "verification FAILED for this policy; output was forced.\n"
    "Review the verification report before deploying."
)

FORMATS = ("iptables", "openflow", "dot")


@dataclass
class PipelineResult:
    """Every intermediate artifact of one pipeline run, kept for inspection."""

    scenario: Scenario
    instances: list
    policy_initial: PolicyGraph
    report_initial: VerificationReport
    policy: PolicyGraph
    report_policy: VerificationReport
    stateful: StatefulPolicy | None = None
    report_stateful: st.StatefulReport | None = None
    configs: dict[str, str] = field(default_factory=dict)
    config_errors: dict[str, str] = field(default_factory=dict)
    withheld: bool = False


def run_pipeline(scenario: Scenario, formats=FORMATS, force: bool = False) -> PipelineResult:
    """Run formalization, construction, refinement, stateful upgrade, serialization.

    When verification fails after manual refinement, the stateful step and
    serialization are withheld unless ``force`` is set; forced outputs carry
    a warning header.
    """
    instances = scenario.instantiate()
    policy_initial = syn.construct_policy(scenario.entities, instances)
    report_initial = syn.verify(policy_initial, instances)
    policy, report_policy = syn.refine(policy_initial, scenario.refinements, instances)

    result = PipelineResult(
        scenario, instances, policy_initial, report_initial, policy, report_policy
    )
    if report_policy.overall:
        result.stateful = st.compute_stateful(
            policy, instances, preferences=scenario.stateful_preferences or None
        )
        result.report_stateful = st.verify_stateful(result.stateful, instances)
    elif not force:
        result.withheld = True
        return result

    sp = result.stateful if result.stateful is not None else StatefulPolicy(policy, frozenset())
    warning = None if report_policy.overall else FORCED_WARNING
    emitters = {
        "iptables": lambda: backends.emit_iptables(sp, scenario.deployment, warning=warning),
        "openflow": lambda: backends.emit_openflow(sp, scenario.deployment, warning=warning),
        "dot": lambda: backends.emit_dot(sp),
    }
    for fmt in formats:
        if fmt != "dot" and scenario.deployment is None:
            result.config_errors[fmt] = "scenario has no deployment map"
            continue
        try:
            result.configs[fmt] = emitters[fmt]()
        except SerializationError as exc:
            # A deployment map may support one backend only (e.g. iptables
            # placeholders without MACs/ports); record why, keep the rest.
            result.config_errors[fmt] = str(exc)
    return result
