"""
Stateful upgrades and the serialization backends
================================================

A one-way flow in the policy becomes much more useful when the
firewall may pass answer packets back. This script shows which flows
qualify, why, and what the generated configurations look like.
"""

from flowsynth import (
    DeploymentMap,
    EntityBinding,
    PolicyGraph,
    SinkRole,
    StatefulPolicy,
    canonical_edges,
    compute_stateful,
    emit_dot,
    emit_openflow,
    instantiate,
    verify_stateful,
)

nodes = frozenset({"Client", "Server", "Audit"})
edges = frozenset({
    ("Client", "Server"),
    ("Client", "Audit"),
    ("Server", "Audit"),
})
graph = PolicyGraph(nodes, edges)
instances = [instantiate("sink", {"Audit": SinkRole.SINK}, nodes)]

# Client -> Server may be answered: the reverse direction violates
# nothing. The flows into Audit may not, because answer packets from a
# sink would leak what the sink has learned.
sp = compute_stateful(graph, instances)
for s, r in canonical_edges(graph.edges):
    mark = "stateful" if (s, r) in sp.stateful else "one-way"
    print(f"  {s} -> {r}  [{mark}]")

# Marking a sink flow by hand fails the information-flow criterion:
bad = StatefulPolicy(graph, frozenset({("Server", "Audit")}))
report = verify_stateful(bad, instances)
print("\nforcing Server<->Audit:", "ok" if report.overall else "rejected")
for crit in report.results:
    if not crit.ok:
        print(f"  failed criterion: {crit.criterion} ({crit.label})")

# Serialization needs concrete addresses for OpenFlow. The DOT backend
# draws stateful flows with double-headed arrows.
deployment = DeploymentMap({
    "Client": EntityBinding(ipv4="10.0.0.1", mac="02:00:00:00:00:01", switch_port=1),
    "Server": EntityBinding(ipv4="10.0.0.2", mac="02:00:00:00:00:02", switch_port=2),
    "Audit": EntityBinding(ipv4="10.0.0.3", mac="02:00:00:00:00:03", switch_port=3),
})

print("\nOpenFlow table:")
print(emit_openflow(sp, deployment))
print("DOT graph:")
print(emit_dot(sp))
