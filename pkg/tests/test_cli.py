"""
Command-line runs against the golden sessions in tests/golden.
"""
import io
import json
from pathlib import Path

import pytest
from sympy.polys.polyerrors import CoercionFailed

from app.cli import main
from app.errors import InternalInvariant
from app.schemas import Report
from app.session import runner

GOLDEN = Path(__file__).parent / "golden"
CASES = sorted(p.stem for p in GOLDEN.glob("*.wd"))


def _is_subset(expected, actual) -> bool:
    if isinstance(expected, dict):
        return isinstance(actual, dict) and all(k in actual and _is_subset(v, actual[k]) for k, v in expected.items())
    return expected == actual


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.mark.parametrize("case", CASES)
def test_golden_session(case, capsys) -> None:
    """
    Each golden session produces a report containing the expected fields.
    """
    expected = json.loads((GOLDEN / f"{case}.json").read_text(encoding="utf-8"))
    code, report = _run(capsys, [str(GOLDEN / f"{case}.wd")])
    assert code == expected["exit_code"]
    assert _is_subset(expected, report), report


def test_reads_standard_input(monkeypatch, capsys) -> None:
    """
    A dash reads the session from standard input.
    """
    source = (GOLDEN / "grade_tate.wd").read_text(encoding="utf-8")
    monkeypatch.setattr("sys.stdin", io.StringIO(source))
    code, report = _run(capsys, ["-"])
    assert code == 0
    assert report["verdicts"] == {"grade": 1}
    assert report["command"] == "check M grade"


def test_reports_are_deterministic(capsys) -> None:
    """
    Two runs of one session differ at most in their timing.
    """
    path = str(GOLDEN / "charcycle_euler.wd")
    _, first = _run(capsys, [path])
    _, second = _run(capsys, [path])
    first.pop("timing_ms")
    second.pop("timing_ms")
    assert first == second


def test_stats_flag_attaches_engine_counters(capsys) -> None:
    """
    --stats adds the S-pair and basis counters to the report.
    """
    _, report = _run(capsys, [str(GOLDEN / "gb_unit.wd"), "--stats"])
    assert report["stats"]["bases_computed"] >= 1
    assert report["stats"]["spairs_processed"] >= 1


def test_summary_without_command(tmp_path, capsys) -> None:
    """
    A session with no check echoes its declarations.
    """
    path = tmp_path / "decl.wd"
    path.write_text("ring W(2) over QQ;\nmodule M = coker [[d1], [d2]];\n", encoding="utf-8")
    code, report = _run(capsys, [str(path)])
    assert code == 0
    assert report["command"] == "summary"
    assert report["verdicts"]["ring"] == "W(2) over QQ"
    assert report["verdicts"]["modules"]["M"]["relations"] == [["d1"], ["d2"]]


def test_invalid_override_is_a_configuration_error(capsys) -> None:
    """
    A non-positive degree bound is refused before any computation.
    """
    code = main([str(GOLDEN / "grade_tate.wd"), "--max-degree", "0"])
    assert code == 1
    assert "configuration error" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys) -> None:
    """
    An unreadable input file exits with code 1.
    """
    code = main([str(tmp_path / "absent.wd")])
    assert code == 1
    assert "cannot read" in capsys.readouterr().err


def _crashing_handler(ctx, cmd):
    raise CoercionFailed("cannot convert 1/x1 to QQ")


def test_unexpected_engine_failure_is_reported(monkeypatch, capsys) -> None:
    """
    A non-domain exception inside a command becomes an E_INTERNAL report with exit code 3.
    """
    monkeypatch.setitem(runner.HANDLERS, "grade", _crashing_handler)
    code, report = _run(capsys, [str(GOLDEN / "grade_tate.wd")])
    assert code == 3
    assert report["status"] == "error"
    assert report["error"]["code"] == "E_INTERNAL"
    assert "CoercionFailed" in report["error"]["message"]


def test_broken_invariant_keeps_its_code(monkeypatch) -> None:
    """
    InternalInvariant raised by the engine is reported like any domain error.
    """
    def handler(ctx, cmd):
        raise InternalInvariant("S-vector of a Gröbner basis did not reduce to zero")

    monkeypatch.setitem(runner.HANDLERS, "dim", handler)
    report = runner.run_source("ring W(1) over QQ;\nmodule M = coker [[d1]];\ncheck M dim")
    assert isinstance(report, Report)
    assert (report.exit_code, report.error.code) == (3, "E_INTERNAL")
