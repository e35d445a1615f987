import asyncio
import json

import pytest

from floerd.core.exceptions import PreconditionError, ReportIOError
from floerd.services.obstruction_service import ObstructionService


@pytest.fixture(scope="module")
def control_report():
    return asyncio.run(ObstructionService.obstruct(5, knot="torus:4,5"))


@pytest.fixture(scope="module")
def p7_report():
    return asyncio.run(ObstructionService.obstruct(7, bounds_only=True))


def test_theorem_applies():
    assert ObstructionService.theorem_applies(3, "lp:3")
    assert ObstructionService.theorem_applies(7, "lp:7")
    assert not ObstructionService.theorem_applies(5, "torus:4,5")
    assert not ObstructionService.theorem_applies(7, "lp:3")


def test_control_run_is_unobstructed(control_report):
    assert control_report.verdict == "unobstructed"
    assert control_report.mode == "computed"
    assert not control_report.theorem_applies
    assert control_report.provenance.generator_count == 7
    assert any("control run" in note for note in control_report.provenance.notes)
    assert [v.consistency for v in control_report.metabolizers] == ["consistent"]


def test_control_run_text(control_report, golden):
    assert ObstructionService.render(control_report, "text") == golden("t45_control.txt")


def test_control_run_csv(control_report, golden):
    assert ObstructionService.render(control_report, "csv") == golden("t45_control.csv")


def test_p7_switches_to_bounds(p7_report):
    assert p7_report.verdict == "obstructed"
    assert p7_report.mode == "bounds-only"
    assert p7_report.theorem_applies
    assert p7_report.provenance.generator_count == 11 * 15 ** 10
    assert p7_report.table.d0 == -8
    assert p7_report.table.entry(7).dbar_kind == "lower_bound"


def test_lp7_without_flag_falls_back_to_bounds():
    report = asyncio.run(ObstructionService.obstruct(7))
    assert report.mode == "bounds-only"
    assert any("switched to bounds-only" in note for note in report.provenance.notes)


def test_bounds_text_marks_the_claimed_values(p7_report):
    text = ObstructionService.render(p7_report, "text")
    assert "d(S^3_{49}(lp:7), s_{0}) <= -8 (claimed)" in text
    assert "dbar(s_{7}) >= 2" in text
    assert text.endswith("verdict: obstructed\n")


def test_knot_must_match_p():
    with pytest.raises(PreconditionError):
        asyncio.run(ObstructionService.obstruct(7, knot="lp:3"))


def test_bounds_only_needs_lp():
    with pytest.raises(PreconditionError):
        asyncio.run(ObstructionService.obstruct(5, knot="torus:4,5", bounds_only=True))


def test_unknown_format(control_report):
    with pytest.raises(PreconditionError):
        ObstructionService.render_table(control_report.table, "xml")


def test_emit_and_read_back(tmp_path, p7_report):
    path = tmp_path / "report.json"
    text = ObstructionService.emit(p7_report, "json", path)
    assert json.loads(path.read_text()) == json.loads(text)
    table = ObstructionService.read_table(path)
    assert table == p7_report.table


def test_emit_to_a_missing_directory(tmp_path, p7_report):
    with pytest.raises(ReportIOError) as excinfo:
        ObstructionService.emit(p7_report, "json", tmp_path / "missing" / "report.json")
    assert excinfo.value.exit_code == 2


def test_read_table_errors(tmp_path):
    with pytest.raises(ReportIOError):
        ObstructionService.read_table(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"knot": "x"}')
    with pytest.raises(PreconditionError):
        ObstructionService.read_table(bad)
