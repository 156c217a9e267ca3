"""flowsynth: network security configurations from high-level invariants.

Pipeline: declare entities and security invariants, construct the
maximum-permissive policy graph, optionally refine it by hand (with
re-verification), upgrade it to a stateful policy, and serialize to iptables
or OpenFlow configurations.
"""

from importlib import resources

from .backends import (
    DeploymentMap,
    EntityBinding,
    emit_dot,
    emit_iptables,
    emit_openflow,
    parse_iptables,
)
from .errors import (
    EditError,
    FlowsynthError,
    OracleError,
    ScenarioError,
    SerializationError,
    SynthesisError,
)
from .invariants import (
    BlpLabel,
    InvariantInstance,
    Kind,
    SinkRole,
    SubnetRole,
    auto_complete,
    check_deny_all,
    holds,
    instantiate,
    offending_flows,
    phi,
)
from .model import (
    PolicyGraph,
    StatefulPolicy,
    canonical_edges,
    complete_graph,
    empty_graph,
    reachable,
    reverse_edges,
)
from .scenario import (
    PipelineResult,
    Scenario,
    emit_scenario,
    parse_scenario,
    run_pipeline,
)
from .stateful import (
    StatefulReport,
    brute_force_stateful_oracle,
    compute_stateful,
    verify_stateful,
)
from .synthesis import (
    RefinementEdit,
    VerificationReport,
    construct_policy,
    refine,
    verify,
)

__version__ = "0.1.0"


def case_study_json() -> str:
    """The bundled five-host web application scenario, as JSON text."""
    return resources.files("flowsynth.data").joinpath("case_study.json").read_text()


def case_study() -> Scenario:
    """The bundled five-host web application scenario, parsed."""
    return parse_scenario(case_study_json())
