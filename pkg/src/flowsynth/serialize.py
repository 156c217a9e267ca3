"""JSON-friendly views of graphs and reports, shared by the CLI and the API."""

from __future__ import annotations

from .model import PolicyGraph, StatefulPolicy, canonical_edges
from .stateful import StatefulReport
from .synthesis import VerificationReport


def edge_list(edges) -> list[dict]:
    return [{"from": s, "to": r} for s, r in canonical_edges(edges)]


def graph_to_json(graph: PolicyGraph) -> dict:
    return {"nodes": sorted(graph.nodes), "edges": edge_list(graph.edges)}


def stateful_to_json(sp: StatefulPolicy) -> dict:
    doc = graph_to_json(sp.graph)
    doc["stateful"] = edge_list(sp.stateful)
    return doc


def report_to_json(report: VerificationReport) -> dict:
    return {
        "overall": report.overall,
        "results": [
            {
                "label": r.label,
                "template": r.template,
                "holds": r.holds,
                "offending": edge_list(r.offending),
            }
            for r in report.results
        ],
    }


def stateful_report_to_json(report: StatefulReport) -> dict:
    return {
        "overall": report.overall,
        "results": [
            {
                "label": r.label,
                "template": r.template,
                "criterion": r.criterion,
                "ok": r.ok,
                "offending": edge_list(r.offending),
            }
            for r in report.results
        ],
    }
