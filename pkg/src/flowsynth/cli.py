"""Command-line driver for the pipeline.

Exit codes: 0 success, 2 verification failure, 3 scenario error,
4 serialization error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenario as scn, serialize
from .errors import (
    EditError,
    OracleError,
    ScenarioError,
    SerializationError,
    SynthesisError,
)
from .model import canonical_edges

EXIT_OK = 0
EXIT_VERIFICATION = 2
EXIT_SCENARIO = 3
EXIT_SERIALIZATION = 4


def _load(path: str) -> scn.Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}")
    return scn.parse_scenario(text)


def _print_report(report, out=None):
    out = out or sys.stdout
    for r in report.results:
        status = "ok" if r.holds else "VIOLATED"
        line = f"  [{status}] {r.label} ({r.template})"
        if not r.holds:
            edges = ", ".join(f"{s}->{d}" for s, d in canonical_edges(r.offending))
            line += f" offending: {edges}"
        print(line, file=out)
    print(f"overall: {'PASS' if report.overall else 'FAIL'}", file=out)


def _parse_formats(value: str):
    formats = tuple(f.strip() for f in value.split(","))
    if "all" in formats:
        return scn.FORMATS
    unknown = set(formats) - set(scn.FORMATS)
    if unknown:
        raise ScenarioError(f"unknown output formats: {sorted(unknown)}")
    return formats


def cmd_synth(args) -> int:
    scenario = _load(args.scenario)
    formats = _parse_formats(args.format)
    needs_deployment = set(formats) & {"iptables", "openflow"}
    if needs_deployment and scenario.deployment is None:
        raise SerializationError(
            f"formats {sorted(needs_deployment)} need a 'deployment' section in the scenario"
        )
    result = scn.run_pipeline(scenario, formats=formats, force=args.force)
    _print_report(result.report_policy)
    if result.withheld:
        print("verification failed; no configuration written (use --force to override)")
        return EXIT_VERIFICATION
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ext = {"iptables": "rules", "openflow": "flows", "dot": "dot"}
    for fmt, text in result.configs.items():
        target = out / f"policy.{ext[fmt]}"
        target.write_text(text)
        print(f"wrote {target}")
    for fmt, reason in result.config_errors.items():
        print(f"skipped {fmt}: {reason}", file=sys.stderr)
    if result.config_errors and args.format != "all":
        # The user asked for these formats by name; failing them is an error.
        return EXIT_SERIALIZATION
    return EXIT_OK if result.report_policy.overall else EXIT_VERIFICATION


def cmd_verify(args) -> int:
    scenario = _load(args.scenario)
    result = scn.run_pipeline(scenario, formats=())
    _print_report(result.report_policy)
    return EXIT_OK if result.report_policy.overall else EXIT_VERIFICATION


def cmd_stateful(args) -> int:
    scenario = _load(args.scenario)
    result = scn.run_pipeline(scenario, formats=())
    if result.stateful is None:
        _print_report(result.report_policy)
        print("verification failed; stateful step withheld")
        return EXIT_VERIFICATION
    for edge in canonical_edges(result.policy.edges):
        mark = "stateful" if edge in result.stateful.stateful else "one-way"
        print(f"  {edge[0]} -> {edge[1]}  [{mark}]")
    print(f"stateful criteria: {'PASS' if result.report_stateful.overall else 'FAIL'}")
    return EXIT_OK


def cmd_report(args) -> int:
    scenario = _load(args.scenario)
    result = scn.run_pipeline(scenario, formats=scn.FORMATS, force=args.force)
    doc = {
        "policy_initial": serialize.graph_to_json(result.policy_initial),
        "report_initial": serialize.report_to_json(result.report_initial),
        "policy": serialize.graph_to_json(result.policy),
        "report_policy": serialize.report_to_json(result.report_policy),
        "stateful": serialize.stateful_to_json(result.stateful) if result.stateful else None,
        "report_stateful": (
            serialize.stateful_report_to_json(result.report_stateful)
            if result.report_stateful else None
        ),
        "configs": result.configs,
        "withheld": result.withheld,
    }
    if args.json:
        json.dump(doc, sys.stdout, indent=2)
        print()
    else:
        _print_report(result.report_policy)
    return EXIT_OK if result.report_policy.overall else EXIT_VERIFICATION


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(snapshot_dir=args.snapshot_dir), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowsynth",
        description="Synthesize firewall/SDN configurations from security invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="run the full pipeline and write configurations")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", default="all", help="comma list of iptables,openflow,dot (or all)")
    p.add_argument("--force", action="store_true", help="serialize even if verification fails")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="construct the policy, apply refinements, verify")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stateful", help="show the computed stateful policy")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_stateful)

    p = sub.add_parser("report", help="dump all pipeline artifacts")
    p.add_argument("scenario")
    p.add_argument("--json", action="store_true")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service for the web UI")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--snapshot-dir", default=None, help="persist session snapshots here")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, EditError, OracleError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except SynthesisError as exc:
        print(f"synthesis error: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except SerializationError as exc:
        print(f"serialization error: {exc}", file=sys.stderr)
        return EXIT_SERIALIZATION


if __name__ == "__main__":
    sys.exit(main())
