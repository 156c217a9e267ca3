import random

import pytest
from hypothesis import given, settings, strategies as st

from flowsynth import (
    BlpLabel,
    PolicyGraph,
    ScenarioError,
    SinkRole,
    SubnetRole,
    auto_complete,
    check_deny_all,
    empty_graph,
    holds,
    instantiate,
    offending_flows,
    phi,
)
from flowsynth.invariants import REGISTRY, Kind, Template, get_template

from conftest import (
    CASE_ENTITIES,
    case_study_instances,
    closure_matrix,
    random_graph,
    random_not_comm_with,
    random_phi_instances,
)


class TestAutoComplete:
    def test_sink_defaults(self):
        total = auto_complete(get_template("sink"), {"Log": SinkRole.SINK}, CASE_ENTITIES)
        assert total["Log"] is SinkRole.SINK
        assert all(total[e] is SinkRole.UNASSIGNED for e in CASE_ENTITIES if e != "Log")

    def test_empty_declaration_gives_all_defaults(self):
        for template in REGISTRY.values():
            total = auto_complete(template, {}, ["A", "B"])
            assert set(total) == {"A", "B"}
            assert all(v == template.default_attr() for v in total.values())

    def test_blp_case_study_labels(self):
        declared = {
            "DB": BlpLabel(1, False),
            "Log": BlpLabel(1, False),
            "WebApp": BlpLabel(0, True),
        }
        total = auto_complete(get_template("blp"), declared, CASE_ENTITIES)
        assert total["WebFrnt"] == BlpLabel(0, False)
        assert total["INET"] == BlpLabel(0, False)

    def test_unknown_entity_rejected(self):
        with pytest.raises(ScenarioError, match="unknown entities"):
            auto_complete(get_template("sink"), {"Ghost": SinkRole.SINK}, CASE_ENTITIES)

    def test_acl_naming_non_entity_rejected(self):
        with pytest.raises(ScenarioError, match="unknown entities"):
            auto_complete(get_template("comm_partners"), {"DB": frozenset({"Ghost"})}, CASE_ENTITIES)

    def test_idempotent_on_total_map(self):
        template = get_template("subnets")
        total = auto_complete(template, {"A": SubnetRole.MEMBER}, ["A", "B"])
        assert auto_complete(template, total, ["A", "B"]) == total


class TestPhi:
    def test_subnets_blocks_outside_to_member(self):
        i = instantiate("subnets", {"M": SubnetRole.MEMBER, "G": SubnetRole.INBOUND_GATEWAY}, ["M", "G", "X"])
        assert not phi(i, "X", "M")
        assert phi(i, "X", "G")
        assert phi(i, "G", "M")
        assert phi(i, "M", "X")
        assert phi(i, "G", "X")

    def test_sink_blocks_all_outbound(self):
        i = instantiate("sink", {"S": SinkRole.SINK}, ["S", "A"])
        assert not phi(i, "S", "A")
        assert phi(i, "A", "S")

    def test_blp_no_write_down(self):
        i = instantiate("blp", {"Hi": BlpLabel(1)}, ["Hi", "Lo"])
        assert not phi(i, "Hi", "Lo")
        assert phi(i, "Lo", "Hi")

    def test_blp_trusted_declassifies(self):
        i = instantiate("blp", {"T": BlpLabel(1, trusted=True)}, ["T", "Lo"])
        assert phi(i, "T", "Lo")

    def test_blp_trusted_receives_any_level(self):
        i = instantiate("blp", {"Hi": BlpLabel(2), "T": BlpLabel(0, trusted=True)}, ["Hi", "T"])
        assert phi(i, "Hi", "T")

    def test_comm_partners_acl(self):
        i = instantiate("comm_partners", {"DB": frozenset({"WebApp"})}, CASE_ENTITIES)
        assert not phi(i, "WebFrnt", "DB")
        assert phi(i, "WebApp", "DB")
        assert phi(i, "DB", "WebApp")  # outbound unrestricted

    def test_non_phi_template_rejects_phi(self):
        i = instantiate("not_comm_with", {}, ["A", "B"])
        with pytest.raises(TypeError, match="not phi-structured"):
            phi(i, "A", "B")


class TestHolds:
    def test_vacuous_on_empty_graph(self):
        rng = random.Random(7)
        for i in random_phi_instances(rng, list("ABCD")) + [random_not_comm_with(rng, list("ABCD"))]:
            assert holds(i, empty_graph("ABCD"))

    def test_sink_violated_by_outbound_edge(self):
        instances = case_study_instances()
        sink = next(i for i in instances if i.template.id == "sink")
        g = PolicyGraph(frozenset(CASE_ENTITIES), frozenset({("Log", "DB")}))
        assert not holds(sink, g)

    def test_not_comm_with_transitive(self):
        i = instantiate("not_comm_with", {"A": frozenset({"C"})}, ["A", "B", "C"])
        g = PolicyGraph(frozenset("ABC"), frozenset({("A", "B"), ("B", "C")}))
        assert not holds(i, g)
        assert holds(i, g.remove_edge(("B", "C")))

    def test_missing_attrs_rejected(self):
        i = instantiate("sink", {}, ["A", "B"])
        g = empty_graph(["A", "B", "C"])
        with pytest.raises(ScenarioError, match="missing"):
            holds(i, g)


class TestOffendingFlows:
    def test_empty_family_when_holding(self):
        i = instantiate("sink", {}, ["A", "B"])
        g = PolicyGraph(frozenset("AB"), frozenset({("A", "B")}))
        assert offending_flows(i, g) == ()

    def test_sink_offending_edges(self):
        i = instantiate("sink", {"Log": SinkRole.SINK}, ["Log", "DB"])
        g = PolicyGraph(frozenset({"Log", "DB"}), frozenset({("Log", "DB"), ("DB", "Log")}))
        assert offending_flows(i, g) == (frozenset({("Log", "DB")}),)

    def test_not_comm_with_path_edges_only(self):
        i = instantiate("not_comm_with", {"A": frozenset({"C"})}, ["A", "B", "C", "D"])
        g = PolicyGraph(frozenset("ABCD"), frozenset({("A", "B"), ("B", "C"), ("B", "D")}))
        assert offending_flows(i, g) == (frozenset({("A", "B"), ("B", "C")}),)

    @given(st.integers(0, 2_000))
    @settings(max_examples=60, deadline=None)
    def test_removing_offending_set_restores_holds(self, seed):
        rng = random.Random(seed)
        entities = [f"H{i}" for i in range(rng.randint(2, 6))]
        g = random_graph(rng, entities)
        for i in random_phi_instances(rng, entities) + [random_not_comm_with(rng, entities)]:
            family = offending_flows(i, g)
            assert bool(family) == (not holds(i, g))
            if family:
                assert holds(i, g.with_edges(g.edges - family[0]))

    @given(st.integers(0, 2_000))
    @settings(max_examples=60, deadline=None)
    def test_monotone_under_edge_removal(self, seed):
        rng = random.Random(seed)
        entities = [f"H{i}" for i in range(rng.randint(2, 6))]
        g = random_graph(rng, entities)
        for i in random_phi_instances(rng, entities) + [random_not_comm_with(rng, entities)]:
            if not holds(i, g):
                continue
            kept = frozenset(e for e in g.edges if rng.random() < 0.5)
            assert holds(i, g.with_edges(kept))

    def test_not_comm_with_oracle_agreement(self):
        # Reachability-based semantics must agree with the closure matrix.
        rng = random.Random(11)
        for _ in range(50):
            entities = [f"H{i}" for i in range(rng.randint(2, 6))]
            i = random_not_comm_with(rng, entities)
            g = random_graph(rng, entities)
            closure = closure_matrix(g)
            expected = all(
                not closure[(v, t)]
                for v in entities
                for t in i.attrs[v]
            )
            assert holds(i, g) == expected


class _RequiresAnEdge(Template):
    """Test-only template violating the deny-all precondition."""

    id = "test_requires_edge"
    kind = Kind.ACS
    phi_structured = False

    def default_attr(self):
        return None

    def holds(self, instance, graph):
        return bool(graph.edges)

    def offending_flows(self, instance, graph):
        return ()


REGISTRY.pop("test_requires_edge")  # keep the shipped registry clean


class TestCheckDenyAll:
    def test_all_shipped_templates_pass(self):
        rng = random.Random(3)
        for _ in range(25):
            entities = [f"H{i}" for i in range(rng.randint(1, 6))]
            for i in random_phi_instances(rng, entities) + [random_not_comm_with(rng, entities)]:
                assert check_deny_all(i)

    def test_broken_template_fails(self):
        from types import MappingProxyType

        from flowsynth.invariants import InvariantInstance

        template = _RequiresAnEdge()
        i = InvariantInstance(
            template=template,
            attrs=MappingProxyType({"A": None, "B": None}),
            declared=MappingProxyType({}),
            label="broken",
        )
        assert not check_deny_all(i)

    def test_case_study_instances_pass(self):
        for i in case_study_instances():
            assert check_deny_all(i)
