"""
The what-if session service
===========================

The HTTP service wraps the library in revisioned editing sessions so a
UI (or this script) can probe edits before committing them. Run
against a live server with `flowsynth serve`, or in-process as here.
"""

import json

from fastapi.testclient import TestClient

from flowsynth import case_study_json
from flowsynth.service import create_app

client = TestClient(create_app())

# Open a session on the case study. The service constructs the policy
# immediately; revision 0 is the untouched 10-flow graph.
resp = client.post("/sessions", json=json.loads(case_study_json()))
session = resp.json()
sid = session["id"]
print(f"session {sid} at revision {session['revision']}")

# What would happen if the log server could reach the Internet?
# The what-if endpoint answers without changing anything.
probe = client.post(f"/sessions/{sid}/whatif", json={
    "edits": [{"op": "add", "from": "Log", "to": "INET"}],
})
report = probe.json()["report"]
print("\nwhat-if Log -> INET:", "pass" if report["overall"] else "violations")
for r in report["results"]:
    if not r["holds"]:
        print(f"  {r['label']} ({r['template']}) offending:",
              [(e['from'], e['to']) for e in r["offending"]])
print("revision after what-if:", probe.json()["revision"])

# The real refinement: drop the frontend's outbound Internet flow.
commit = client.post(f"/sessions/{sid}/edits", json={
    "edits": [{"op": "remove", "from": "WebFrnt", "to": "INET"}],
})
print("\ncommitted remove WebFrnt -> INET, revision",
      commit.json()["revision"])

# Stateful computation and a configuration preview.
client.post(f"/sessions/{sid}/stateful", json={})
rules = client.get(f"/sessions/{sid}/configs", params={"format": "iptables"})
print("\niptables preview:")
print(rules.text)
