"""
Tests for data files, metadata sidecars and console summaries
"""

import json
import math

import pytest
from rich.console import Console

from libs.reporting import ReportGenerator, format_float


@pytest.fixture
def recorder() -> Console:
    return Console(record=True, width=120)


@pytest.mark.parametrize("value,text", [
    (0.1, "0.1"),
    (1 / 3, "0.3333333333333333"),
    (1e-20, "1e-20"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
    (math.nan, "nan"),
    (3, "3"),
    ("remove", "remove"),
])
def test_format_float(value, text):
    assert format_float(value) == text


def test_format_float_round_trips():
    for x in (math.pi, 15.7, 2.0 ** -40, 0.1 + 0.2):
        assert float(format_float(x)) == x


def test_resolve_destination(tmp_path):
    to_stdout = ReportGenerator()
    assert to_stdout.resolve_destination(None, "gate", "json") is None
    assert to_stdout.resolve_destination("-", "gate", "json") is None
    assert to_stdout.resolve_destination(tmp_path / "x.json", "gate", "json") == tmp_path / "x.json"

    to_dir = ReportGenerator(output_dir=tmp_path)
    assert to_dir.resolve_destination(None, "gate", "json") == tmp_path / "gate.json"
    assert to_dir.resolve_destination("-", "gate", "json") is None


def test_write_csv_to_stdout(capsys):
    ReportGenerator().write_csv(["t", "fidelity"], [(0.0, 1.0), (0.5, 1 / 3)])
    assert capsys.readouterr().out == "t,fidelity\n0.0,1.0\n0.5,0.3333333333333333\n"


def test_write_json_creates_parent_directories(tmp_path):
    destination = tmp_path / "nested" / "out.json"
    ReportGenerator().write_json({"value": math.inf}, destination)
    text = destination.read_text()
    assert text.endswith("\n")
    assert json.loads(text) == {"value": math.inf}


def test_write_metadata(tmp_path):
    destination = tmp_path / "curve.csv"
    reporter = ReportGenerator(package_version="1.0.0")
    sidecar = reporter.write_metadata(destination, "gate-curve", {"gate": "not"}, {"eta": 0.001})
    assert sidecar == tmp_path / "curve.meta.json"
    metadata = json.loads(sidecar.read_text())
    assert metadata["arguments"] == {"gate": "not"}
    assert metadata["package_version"] == "1.0.0"
    assert metadata["data_file"] == "curve.csv"
    assert reporter.write_metadata(None, "gate-curve", {}) is None


def test_render_summary(recorder):
    ReportGenerator(console=recorder).render_summary("NOT gate", {"gate fidelity": 0.93})
    text = recorder.export_text()
    assert "gate fidelity" in text
    assert "0.93" in text


def test_render_acceptance(recorder):
    check = {
        "criterion": 7, "name": "PHASE simultaneous t_gap=15.9", "comparison": "approx",
        "expected": 0.96, "observed": 0.955, "tolerance": 0.03, "passed": True,
        "asserted": True,
    }
    info = dict(check, name="NOT distinct (6, 8, 10)", asserted=False, passed=False)
    report = {
        "checks": [check, info],
        "literal_thermal": [dict(check, name="cluster fidelity at t=15.7", asserted=False)],
        "convention": None,
        "flagged": True,
        "passed": True,
    }
    ReportGenerator(console=recorder).render_acceptance(report)
    text = recorder.export_text()
    assert "PHASE simultaneous t_gap=15.9" in text
    assert "info" in text
    assert "FLAGGED" in text
    assert "Literal thermal profile" in text
    assert "PASS" in text


@pytest.mark.parametrize("comparison,expected", [
    ("approx", "0.5 ± 0.03"),
    ("gt", "> 0.5"),
    ("lt", "< 0.5"),
    ("le", "≤ 0.53"),
])
def test_acceptance_row_expectations(comparison, expected):
    check = {"criterion": 1, "name": "x", "comparison": comparison, "expected": 0.5,
             "observed": 0.5, "tolerance": 0.03, "passed": True, "asserted": True}
    assert ReportGenerator._acceptance_row(check)[2] == expected


def test_render_acceptance_lists_unmet_checks(recorder):
    check = {
        "criterion": 7, "name": "HADAMARD simultaneous valley near t_gap=39.2",
        "comparison": "approx", "expected": 39.2, "observed": 39.85, "tolerance": 0.3,
        "passed": False, "asserted": True,
    }
    report = {
        "checks": [check],
        "unmet": [{"criterion": 7, "name": check["name"], "expected": 39.2,
                   "observed": 39.85, "discrepancy": 0.65}],
        "convention": None,
        "flagged": True,
        "passed": False,
    }
    ReportGenerator(console=recorder).render_acceptance(report)
    text = recorder.export_text()
    assert "UNMET" in text
    assert "+0.650" in text
    assert "FAIL" in text
