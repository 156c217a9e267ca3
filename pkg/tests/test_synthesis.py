import random
from types import MappingProxyType

import pytest
from hypothesis import given, settings, strategies as st

from flowsynth import (
    EditError,
    PolicyGraph,
    RefinementEdit,
    SynthesisError,
    complete_graph,
    construct_policy,
    instantiate,
    reachable,
    refine,
    verify,
)
from flowsynth.invariants import InvariantInstance

from conftest import (
    CASE_ENTITIES,
    CASE_POLICY_EDGES,
    CASE_REFINED_EDGES,
    case_study_instances,
    enumerate_max_policy,
    random_not_comm_with,
    random_phi_instances,
)
from test_invariants import _RequiresAnEdge


def broken_instance(entities):
    return InvariantInstance(
        template=_RequiresAnEdge(),
        attrs=MappingProxyType({e: None for e in entities}),
        declared=MappingProxyType({}),
        label="broken",
    )


class TestConstructPolicy:
    def test_no_instances_yields_complete_graph(self):
        assert construct_policy(["A", "B", "C"], []) == complete_graph(["A", "B", "C"])

    def test_case_study_policy(self):
        policy = construct_policy(CASE_ENTITIES, case_study_instances())
        assert policy.edges == CASE_POLICY_EDGES

    def test_transitive_blacklist_breaks_all_paths(self):
        i = instantiate("not_comm_with", {"A": frozenset({"C"})}, ["A", "B", "C"])
        policy = construct_policy(["A", "B", "C"], [i])
        assert "C" not in reachable(policy, "A")

    def test_deny_all_precondition_enforced(self):
        with pytest.raises(SynthesisError, match="'broken'"):
            construct_policy(["A", "B"], [broken_instance(["A", "B"])])

    @given(st.integers(0, 5_000))
    @settings(max_examples=100, deadline=None)
    def test_soundness(self, seed):
        rng = random.Random(seed)
        entities = [f"H{i}" for i in range(rng.randint(2, 6))]
        instances = random_phi_instances(rng, entities) + [random_not_comm_with(rng, entities)]
        policy = construct_policy(entities, instances)
        assert verify(policy, instances).overall

    @given(st.integers(0, 5_000))
    @settings(max_examples=60, deadline=None)
    def test_phi_maximality(self, seed):
        rng = random.Random(seed)
        entities = [f"H{i}" for i in range(rng.randint(2, 6))]
        instances = random_phi_instances(rng, entities)
        policy = construct_policy(entities, instances)
        assert verify(policy, instances).overall
        missing = complete_graph(entities).edges - policy.edges
        for edge in missing:
            assert not verify(policy.add_edge(edge), instances).overall

    @given(st.integers(0, 5_000))
    @settings(max_examples=25, deadline=None)
    def test_brute_force_equivalence(self, seed):
        rng = random.Random(seed)
        entities = [f"H{i}" for i in range(rng.randint(2, 4))]
        instances = random_phi_instances(rng, entities)
        policy = construct_policy(entities, instances)
        assert enumerate_max_policy(entities, instances) == policy.edges

    def test_deterministic(self):
        a = construct_policy(CASE_ENTITIES, case_study_instances())
        b = construct_policy(CASE_ENTITIES, case_study_instances())
        assert a == b


class TestVerify:
    def test_constructed_policy_passes(self):
        instances = case_study_instances()
        policy = construct_policy(CASE_ENTITIES, instances)
        assert verify(policy, instances).overall

    def test_added_edge_breaks_sink(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_POLICY_EDGES | {("Log", "INET")})
        report = verify(g, instances)
        assert not report.overall
        sink = next(r for r in report.results if r.template == "sink")
        assert not sink.holds
        assert sink.offending == {("Log", "INET")}

    def test_empty_graph_passes(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), frozenset())
        assert verify(g, instances).overall

    def test_overall_is_conjunction(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_POLICY_EDGES | {("Log", "INET")})
        report = verify(g, instances)
        assert report.overall == all(r.holds for r in report.results)
        for r in report.results:
            if r.holds:
                assert r.offending == frozenset()


class TestRefine:
    def test_scripted_case_study_refinement(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_POLICY_EDGES)
        refined, report = refine(g, [RefinementEdit("remove", "WebFrnt", "INET")], instances)
        assert refined.edges == CASE_REFINED_EDGES
        assert report.overall

    def test_no_edits_is_identity(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_POLICY_EDGES)
        refined, report = refine(g, [], instances)
        assert refined == g
        assert report == verify(g, instances)

    def test_violating_add_reported_not_rejected(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_REFINED_EDGES)
        refined, report = refine(g, [RefinementEdit("add", "INET", "DB")], instances)
        assert ("INET", "DB") in refined.edges
        assert not report.overall
        failing = {r.template: r for r in report.results if not r.holds}
        assert set(failing) == {"comm_partners", "subnets"}
        for r in failing.values():
            assert r.offending == {("INET", "DB")}

    def test_self_loop_edit_rejected(self):
        with pytest.raises(EditError, match="self-loop"):
            RefinementEdit("add", "A", "A")

    def test_unknown_entity_rejected(self):
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_POLICY_EDGES)
        with pytest.raises(EditError, match="unknown entity"):
            refine(g, [RefinementEdit("add", "Ghost", "DB")], case_study_instances())

    def test_remove_then_add_round_trips(self):
        instances = case_study_instances()
        g = PolicyGraph(frozenset(CASE_ENTITIES), CASE_POLICY_EDGES)
        edge = ("WebApp", "DB")
        refined, _ = refine(
            g,
            [RefinementEdit("remove", *edge), RefinementEdit("add", *edge)],
            instances,
        )
        assert refined == g
