"""
Tour of the five invariant templates
====================================

Each template turns a partial attribute assignment into a predicate
over policy graphs. Undeclared hosts get the template's safe default,
so you only annotate the hosts you care about.
"""

from flowsynth import (
    BlpLabel,
    PolicyGraph,
    SinkRole,
    SubnetRole,
    canonical_edges,
    construct_policy,
    holds,
    instantiate,
    offending_flows,
)

hosts = ["Alice", "Bob", "Carol", "Mallory"]


def show(title, instances):
    policy = construct_policy(hosts, instances)
    print(f"{title}: {len(policy.edges)} flows allowed")
    for s, r in canonical_edges(policy.edges):
        print(f"    {s} -> {r}")


# Subnets: members talk among themselves; unassigned hosts may only
# reach a member through an inbound gateway (none declared here, so
# Mallory cannot reach anyone inside).
show("subnets", [instantiate("subnets", {
    "Alice": SubnetRole.MEMBER,
    "Bob": SubnetRole.MEMBER,
    "Carol": SubnetRole.MEMBER,
}, hosts)])

# Sink: a sink absorbs data and never sends. Classic log server.
show("\nsink", [instantiate("sink", {"Carol": SinkRole.SINK}, hosts)])

# Bell-LaPadula: no read-up, no write-down, by confidentiality level.
# Trusted hosts may declassify (their sends behave as level 0).
show("\nblp", [instantiate("blp", {
    "Alice": BlpLabel(level=2),
    "Bob": BlpLabel(level=1),
    "Carol": BlpLabel(level=1, trusted=True),
}, hosts)])

# Comm Partners: a per-receiver allow list of senders.
show("\ncomm_partners", [instantiate("comm_partners", {
    "Alice": frozenset({"Bob"}),
}, hosts)])

# Not Comm With is the odd one out: it forbids *transitive* reach, so
# it is not a per-edge predicate. Construction still works, it just
# falls back to an iterative shrinking pass.
ncw = instantiate("not_comm_with", {"Alice": frozenset({"Mallory"})}, hosts)
show("\nnot_comm_with", [ncw])

# Its offending flows are whole paths, not single edges:
leaky = PolicyGraph(
    frozenset(hosts),
    frozenset({("Alice", "Bob"), ("Bob", "Mallory"), ("Carol", "Bob")}),
)
print("\nleaky graph satisfies not_comm_with:", holds(ncw, leaky))
for group in offending_flows(ncw, leaky):
    print("  offending path edges:", sorted(group))
