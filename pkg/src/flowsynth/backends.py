"""Serialization of stateful policies to enforceable configurations.

Three output formats: iptables FORWARD rules (for a central firewall/VPN
server), OpenFlow flow-table entries (for an SDN switch with fail-mode
secure), and DOT for visualization. All outputs are deterministic: edges are
emitted in canonical (lexicographic) order.

The serialized ruleset must coincide exactly with the policy, so a parser for
the emitted iptables text ships alongside the emitter and the test suite
round-trips through it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ScenarioError, SerializationError
from .model import Edge, Entity, StatefulPolicy, canonical_edges

_IPV4_RE = re.compile(r"^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$")
_MAC_RE = re.compile(r"^([0-9a-f]{2}:){5}[0-9a-f]{2}$")


@dataclass(frozen=True)
class EntityBinding:
    """Network identity of one policy entity.

    ``external`` marks the entity representing the outside world (an
    INET-style aggregate); it keeps wildcard addresses and, for the OpenFlow
    backend, ``switch_port`` names the uplink port it sits behind.
    """

    ipv4: str | None = None
    mac: str | None = None
    switch_port: int | None = None
    iface: str | None = None
    external: bool = False

    def __post_init__(self):
        if self.ipv4 is not None:
            m = _IPV4_RE.match(self.ipv4)
            if not m or any(int(g) > 255 for g in m.groups()):
                raise ScenarioError(f"invalid IPv4 address {self.ipv4!r}")
        if self.mac is not None and not _MAC_RE.match(self.mac):
            raise ScenarioError(f"invalid MAC address {self.mac!r} (expect lowercase colon-hex)")
        if self.switch_port is not None and self.switch_port < 0:
            raise ScenarioError("switch_port must be non-negative")
        if self.external and (self.ipv4 is not None or self.mac is not None):
            raise ScenarioError("external entities must keep wildcard ipv4/mac")


class DeploymentMap:
    """One-to-one binding of policy entity names to network identities.

    Concrete IPv4 and MAC addresses must be unique across entities so no
    host can impersonate another.
    """

    def __init__(self, bindings: dict[Entity, EntityBinding]):
        self.bindings = dict(bindings)
        seen_ips: dict[str, Entity] = {}
        seen_macs: dict[str, Entity] = {}
        for name, b in self.bindings.items():
            if b.ipv4 is not None:
                if b.ipv4 in seen_ips:
                    raise ScenarioError(f"entities {seen_ips[b.ipv4]!r} and {name!r} share IPv4 {b.ipv4}")
                seen_ips[b.ipv4] = name
            if b.mac is not None:
                if b.mac in seen_macs:
                    raise ScenarioError(f"entities {seen_macs[b.mac]!r} and {name!r} share MAC {b.mac}")
                seen_macs[b.mac] = name

    def __eq__(self, other):
        return isinstance(other, DeploymentMap) and self.bindings == other.bindings

    def __repr__(self):
        return f"DeploymentMap({self.bindings!r})"

    def __getitem__(self, name: Entity) -> EntityBinding:
        try:
            return self.bindings[name]
        except KeyError:
            raise SerializationError(f"no deployment record for entity {name!r}") from None

    def __contains__(self, name):
        return name in self.bindings

    def ip_token(self, name: Entity) -> str:
        """Concrete address, or the literal ``$Name_ipv4`` placeholder."""
        binding = self[name]
        return binding.ipv4 if binding.ipv4 is not None else f"${name}_ipv4"

    def iface(self, name: Entity) -> str:
        binding = self[name]
        if binding.iface is None:
            raise SerializationError(f"entity {name!r} has no router interface configured")
        return binding.iface


def emit_iptables(sp: StatefulPolicy, dep: DeploymentMap, warning: str | None = None) -> str:
    """iptables-restore-style FORWARD rules enforcing the stateful policy.

    Default-drop, one ACCEPT per policy edge, and one inserted ESTABLISHED
    rule per stateful edge matching the answer direction.
    """
    lines = []
    if warning:
        lines.extend(f"# WARNING: {line}" for line in warning.splitlines())
    lines.append("FORWARD DROP")
    for s, r in canonical_edges(sp.graph.edges):
        lines.append(
            f"-A FORWARD -i {dep.iface(s)} -s {dep.ip_token(s)}"
            f" -o {dep.iface(r)} -d {dep.ip_token(r)} -j ACCEPT"
        )
    for s, r in canonical_edges(sp.stateful):
        lines.append(
            f"-I FORWARD -m state --state ESTABLISHED -i {dep.iface(r)} -s {dep.ip_token(r)}"
            f" -o {dep.iface(s)} -d {dep.ip_token(s)} -j ACCEPT"
        )
    return "\n".join(lines) + "\n"


_ACCEPT_RE = re.compile(
    r"^-A FORWARD -i (?P<in>\S+) -s (?P<src>\S+) -o (?P<out>\S+) -d (?P<dst>\S+) -j ACCEPT$"
)
_ESTABLISHED_RE = re.compile(
    r"^-I FORWARD -m state --state ESTABLISHED "
    r"-i (?P<in>\S+) -s (?P<src>\S+) -o (?P<out>\S+) -d (?P<dst>\S+) -j ACCEPT$"
)


def parse_iptables(text: str, dep: DeploymentMap) -> tuple[frozenset[Edge], frozenset[Edge]]:
    """Recover (edges, stateful) from emitted iptables text.

    Inverse of :func:`emit_iptables` for the given deployment map; used to
    check that the enforced structure coincides with the policy.
    """
    by_token = {dep.ip_token(name): name for name in dep.bindings}
    edges: set[Edge] = set()
    stateful: set[Edge] = set()

    def resolve(token: str, line: str) -> Entity:
        try:
            return by_token[token]
        except KeyError:
            raise SerializationError(f"unknown address token {token!r} in line: {line}") from None

    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line == "FORWARD DROP":
            continue
        if m := _ACCEPT_RE.match(line):
            edges.add((resolve(m["src"], line), resolve(m["dst"], line)))
        elif m := _ESTABLISHED_RE.match(line):
            # The ESTABLISHED rule matches the answer direction, so the
            # stateful edge runs dst -> src.
            stateful.add((resolve(m["dst"], line), resolve(m["src"], line)))
        else:
            raise SerializationError(f"unrecognized iptables line: {line}")
    return frozenset(edges), frozenset(stateful)


_OPENFLOW_HEADER = (
    "# Flow table for a single switch; load with:\n"
    "#   ovs-vsctl set-fail-mode <switch> secure && ovs-ofctl add-flows <switch> <this file>\n"
    "# fail-mode secure: unmatched traffic drops, no table-miss entry needed.\n"
    "# Note: without a controller answering ARP, the ARP reply entries leave a\n"
    "# small covert channel (timing / OPER field) between hosts that may only\n"
    "# communicate one-way. Deploy a controller-side ARP responder to close it.\n"
)


def _openflow_flow(src: Entity, dst: Entity, dep: DeploymentMap) -> list[str]:
    b_src, b_dst = dep[src], dep[dst]
    for name, b in ((src, b_src), (dst, b_dst)):
        if not b.external and (b.mac is None or b.switch_port is None or b.ipv4 is None):
            raise SerializationError(
                f"entity {name!r} needs concrete ipv4, mac and switch_port for the OpenFlow backend"
            )
        if b.external and b.switch_port is None:
            raise SerializationError(
                f"external entity {name!r} needs a switch_port (uplink) for the OpenFlow backend"
            )

    externals = int(b_src.external) + int(b_dst.external)
    priority = {0: 40000, 1: 30000, 2: 20000}[externals]
    ip_src = "*" if b_src.external else b_src.ipv4
    ip_dst = "*" if b_dst.external else b_dst.ipv4

    entries = [f"# {src} -> {dst}"]
    if externals == 0:
        entries.append(
            f"in_port={b_src.switch_port} dl_src={b_src.mac} dl_dst=ff:ff:ff:ff:ff:ff"
            f" arp arp_sha={b_src.mac} arp_spa={ip_src} arp_tpa={ip_dst}"
            f" priority=40000 action=mod_dl_dst:{b_dst.mac},output:{b_dst.switch_port}"
        )
        entries.append(
            f"dl_src={b_dst.mac} dl_dst={b_src.mac}"
            f" arp arp_sha={b_dst.mac} arp_spa={ip_dst} arp_tpa={ip_src}"
            f" priority=40000 action=output:{b_src.switch_port}"
        )
    match = f"in_port={b_src.switch_port}"
    if b_src.mac is not None:
        match += f" dl_src={b_src.mac}"
    action = f"output:{b_dst.switch_port}"
    if b_dst.mac is not None:
        action = f"mod_dl_dst:{b_dst.mac},{action}"
    entries.append(
        f"{match} ip nw_src={ip_src} nw_dst={ip_dst} priority={priority} action={action}"
    )
    return entries


def emit_openflow(sp: StatefulPolicy, dep: DeploymentMap, warning: str | None = None) -> str:
    """OpenFlow entries: anti-spoofing ARP plus one-way IPv4 per flow.

    Every policy edge yields a flow; every stateful edge additionally yields
    the swapped-direction flow for the answers. Flows with an external
    endpoint wildcard that endpoint's address at reduced priority and skip
    the ARP entries (the outside world sits behind an uplink port).
    """
    lines = []
    if warning:
        lines.extend(f"# WARNING: {line}" for line in warning.splitlines())
    lines.append(_OPENFLOW_HEADER.rstrip("\n"))
    for s, r in canonical_edges(sp.graph.edges):
        lines.extend(_openflow_flow(s, r, dep))
    for s, r in canonical_edges(sp.stateful):
        lines.extend(_openflow_flow(r, s, dep))
    return "\n".join(lines) + "\n"


def emit_dot(sp: StatefulPolicy) -> str:
    """DOT digraph of the policy; stateful edges are drawn bidirectionally."""
    lines = ["digraph policy {"]
    for node in sorted(sp.graph.nodes):
        lines.append(f'  "{node}";')
    for s, r in canonical_edges(sp.graph.edges):
        attr = " [dir=both]" if (s, r) in sp.stateful else ""
        lines.append(f'  "{s}" -> "{r}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"
