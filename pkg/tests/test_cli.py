import json
from pathlib import Path

import pytest

from flowsynth import case_study_json
from flowsynth.cli import main

from conftest import fixture_text


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(case_study_json())
    return path


@pytest.fixture
def failing_scenario_file(tmp_path):
    doc = json.loads(case_study_json())
    doc["refinements"].append({"op": "add", "from": "Log", "to": "INET"})
    path = tmp_path / "failing.json"
    path.write_text(json.dumps(doc))
    return path


class TestSynth:
    def test_writes_configs(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["synth", str(scenario_file), "--out", str(out)]) == 0
        assert (out / "policy.rules").read_text() == fixture_text("case_study_iptables.txt")
        assert (out / "policy.dot").exists()
        captured = capsys.readouterr()
        assert "overall: PASS" in captured.out
        # the placeholder deployment cannot feed the OpenFlow backend
        assert "skipped openflow" in captured.err

    def test_explicit_unavailable_format_fails(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        code = main(["synth", str(scenario_file), "--out", str(out), "--format", "openflow"])
        assert code == 4

    def test_failing_scenario_withheld(self, failing_scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["synth", str(failing_scenario_file), "--out", str(out)])
        assert code == 2
        assert not out.exists()
        assert "no configuration written" in capsys.readouterr().out

    def test_force_writes_with_warning(self, failing_scenario_file, tmp_path):
        out = tmp_path / "out"
        code = main(["synth", str(failing_scenario_file), "--out", str(out), "--force"])
        assert code == 2
        assert (out / "policy.rules").read_text().startswith("# WARNING:")


class TestVerify:
    def test_passing(self, scenario_file, capsys):
        assert main(["verify", str(scenario_file)]) == 0
        assert "overall: PASS" in capsys.readouterr().out

    def test_failing(self, failing_scenario_file, capsys):
        assert main(["verify", str(failing_scenario_file)]) == 2
        out = capsys.readouterr().out
        assert "overall: FAIL" in out
        assert "Log->INET" in out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["verify", str(tmp_path / "nope.json")]) == 3
        assert "scenario error" in capsys.readouterr().err

    def test_invalid_scenario(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"entities": []}')
        assert main(["verify", str(bad)]) == 3


class TestStateful:
    def test_lists_markings(self, scenario_file, capsys):
        assert main(["stateful", str(scenario_file)]) == 0
        out = capsys.readouterr().out
        assert "WebApp -> INET  [stateful]" in out
        assert "WebApp -> Log  [one-way]" in out


class TestReport:
    def test_json_output(self, scenario_file, capsys):
        assert main(["report", str(scenario_file), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["report_policy"]["overall"] is True
        assert len(doc["policy"]["edges"]) == 9
        assert {tuple(e.values()) for e in doc["stateful"]["stateful"]} == {
            ("INET", "WebFrnt"), ("WebApp", "INET"),
        }
        assert doc["configs"]["iptables"] == fixture_text("case_study_iptables.txt")
