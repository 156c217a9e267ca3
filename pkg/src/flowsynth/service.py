"""HTTP facade for the interactive refinement loop.

Sessions hold a parsed scenario plus the current policy; every mutating
request bumps the session revision and responses echo the revision they were
computed against. ``/whatif`` evaluates edits against a hypothetical graph
without touching the session, which is the UI's exploration primitive.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import invariants as inv, scenario as scn, serialize, stateful as st, synthesis as syn
from .errors import (
    EditError,
    ScenarioError,
    SerializationError,
    SynthesisError,
)
from .model import PolicyGraph, StatefulPolicy
from .synthesis import RefinementEdit


class EditIn(BaseModel):
    op: str
    sender: str = Field(alias="from")
    receiver: str = Field(alias="to")

    model_config = {"populate_by_name": True}


class EditsIn(BaseModel):
    edits: list[EditIn]


class EdgeIn(BaseModel):
    sender: str = Field(alias="from")
    receiver: str = Field(alias="to")

    model_config = {"populate_by_name": True}


class StatefulIn(BaseModel):
    preferences: list[EdgeIn] | None = None


@dataclass
class Session:
    id: str
    scenario: scn.Scenario
    instances: list
    policy: PolicyGraph
    report: syn.VerificationReport
    stateful: StatefulPolicy | None = None
    stateful_report: st.StatefulReport | None = None
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


def _error(status: int, stage: str, message: str, path=None):
    detail = {"stage": stage, "message": message}
    if path is not None:
        detail["path"] = path
    return HTTPException(status_code=status, detail=detail)


def _attribute_view(instance: inv.InvariantInstance) -> dict:
    template = instance.template
    return {
        "label": instance.label,
        "template": template.id,
        "attrs": {
            host: {
                "value": template.attr_to_json(attr),
                "declared": host in instance.declared,
            }
            for host, attr in sorted(instance.attrs.items())
        },
    }


def create_app(snapshot_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="flowsynth", version="0.1.0")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    snapshots = Path(snapshot_dir) if snapshot_dir else None
    if snapshots:
        snapshots.mkdir(parents=True, exist_ok=True)

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise _error(404, "session", f"unknown session {session_id}")
        return session

    def snapshot(session: Session):
        if snapshots is None:
            return
        doc = {
            "id": session.id,
            "revision": session.revision,
            "scenario": json.loads(scn.emit_scenario(session.scenario)),
            "policy": serialize.graph_to_json(session.policy),
            "stateful": serialize.stateful_to_json(session.stateful) if session.stateful else None,
        }
        (snapshots / f"{session.id}.json").write_text(json.dumps(doc, indent=2))

    def policy_payload(session: Session) -> dict:
        return {
            "id": session.id,
            "revision": session.revision,
            "graph": serialize.graph_to_json(session.policy),
            "report": serialize.report_to_json(session.report),
            "attributes": [_attribute_view(i) for i in session.instances],
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        try:
            scenario = scn.parse_scenario(json.dumps(body))
            instances = scenario.instantiate()
            # Construction only; the scenario's scripted refinements are the
            # CLI path. Interactive sessions start from the computed policy
            # and the administrator refines by hand.
            policy = syn.construct_policy(scenario.entities, instances)
        except ScenarioError as exc:
            raise _error(422, "scenario", str(exc), path=exc.path)
        except SynthesisError as exc:
            raise _error(422, "construction", str(exc))
        session = Session(
            id=uuid.uuid4().hex,
            scenario=scenario,
            instances=instances,
            policy=policy,
            report=syn.verify(policy, instances),
        )
        with registry_lock:
            sessions[session.id] = session
        snapshot(session)
        return {"id": session.id, "revision": session.revision}

    @app.get("/sessions/{session_id}/policy")
    def get_policy(session_id: str):
        return policy_payload(get_session(session_id))

    @app.post("/sessions/{session_id}/edits")
    def apply_edits(session_id: str, body: EditsIn):
        session = get_session(session_id)
        with session.lock:
            try:
                edits = [RefinementEdit(e.op, e.sender, e.receiver) for e in body.edits]
                policy, report = syn.refine(session.policy, edits, session.instances)
            except (EditError, ScenarioError) as exc:
                raise _error(422, "refinement", str(exc))
            session.policy = policy
            session.report = report
            # A structural edit invalidates any previously computed stateful
            # policy; the client must request it again.
            session.stateful = None
            session.stateful_report = None
            session.revision += 1
            snapshot(session)
            return policy_payload(session)

    @app.post("/sessions/{session_id}/whatif")
    def whatif(session_id: str, body: EditsIn):
        session = get_session(session_id)
        with session.lock:
            revision = session.revision
            policy = session.policy
        try:
            edits = [RefinementEdit(e.op, e.sender, e.receiver) for e in body.edits]
            hypothetical, report = syn.refine(policy, edits, session.instances)
        except (EditError, ScenarioError) as exc:
            raise _error(422, "refinement", str(exc))
        return {
            "id": session.id,
            "revision": revision,
            "graph": serialize.graph_to_json(hypothetical),
            "report": serialize.report_to_json(report),
        }

    @app.post("/sessions/{session_id}/stateful")
    def compute_stateful_endpoint(session_id: str, body: StatefulIn | None = None):
        session = get_session(session_id)
        with session.lock:
            if not session.report.overall:
                raise _error(409, "stateful", "policy fails verification; refine it first")
            preferences = None
            if body and body.preferences:
                preferences = [(e.sender, e.receiver) for e in body.preferences]
            sp = st.compute_stateful(session.policy, session.instances, preferences=preferences)
            session.stateful = sp
            session.stateful_report = st.verify_stateful(sp, session.instances)
            session.revision += 1
            snapshot(session)
            return {
                "id": session.id,
                "revision": session.revision,
                "stateful": serialize.stateful_to_json(sp),
                "report": serialize.stateful_report_to_json(session.stateful_report),
            }

    @app.get("/sessions/{session_id}/configs", response_class=PlainTextResponse)
    def get_configs(
        session_id: str,
        format: str = Query(...),
        force: bool = Query(False),
    ):
        from . import backends

        session = get_session(session_id)
        with session.lock:
            if format not in scn.FORMATS:
                raise _error(422, "serialization", f"unknown format {format!r}")
            if not session.report.overall and not force:
                raise _error(409, "serialization",
                             "policy fails verification; pass force=true to override")
            sp = session.stateful
            if sp is None:
                if session.report.overall:
                    sp = st.compute_stateful(session.policy, session.instances)
                    session.stateful = sp
                    session.stateful_report = st.verify_stateful(sp, session.instances)
                else:
                    sp = StatefulPolicy(session.policy, frozenset())
            warning = None if session.report.overall else scn.FORCED_WARNING
            try:
                if format == "dot":
                    return backends.emit_dot(sp)
                if session.scenario.deployment is None:
                    raise _error(422, "serialization", "scenario has no deployment map")
                if format == "iptables":
                    return backends.emit_iptables(sp, session.scenario.deployment, warning=warning)
                return backends.emit_openflow(sp, session.scenario.deployment, warning=warning)
            except SerializationError as exc:
                raise _error(422, "serialization", str(exc))

    return app


app = create_app()
