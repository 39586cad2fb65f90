import csv
import io
import json
from pathlib import Path

import pytest

from hadprox import Outcome
from hadprox.config import parse_config
from hadprox.runner import CSV_COLUMNS, csv_text, emit_report, markdown_text, run_suite

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = sorted((ROOT / "configs").glob("*.cfg"))
GOLDEN = Path(__file__).parent / "golden"
EXPECTED_EXIT = {"counterexample": 1, "halfplane": 0, "line_prox": 0, "shifted_abs_mainthm": 0,
                 "spider": 0}

HEAD = "[space]\nkind = euclidean\ndim = 1\n\n[suite]\n"


def run(suite_lines: str):
    text = HEAD + suite_lines
    return run_suite(parse_config(text), text)


def rows(report):
    return list(csv.DictReader(io.StringIO(csv_text(report))))


# ---------------------------------------------------------------- golden corpus

@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_golden_csv_and_exit_code(path):
    text = path.read_text()
    report = run_suite(parse_config(text), text)
    assert report.exit_code == EXPECTED_EXIT[path.stem]
    assert csv_text(report) == (GOLDEN / f"{path.stem}.csv").read_text()


def test_every_config_has_a_golden_file():
    assert {p.stem for p in CONFIGS} == {p.stem for p in GOLDEN.glob("*.csv")}


# ---------------------------------------------------------------- run_suite

def test_prox_lemmas_entry():
    """[DERIVED] four conclusion sub-checks, all consistent."""
    report = run("verify_prox_lemmas f=abs x=2\n")
    (entry,) = report.entries
    concl = [name for name, _ in entry.rows
             if name.startswith("conclusion:") and "/" not in name]
    assert concl == ["conclusion:ubound", "conclusion:id2", "conclusion:id1",
                     "conclusion:envelope_monotone"]
    assert entry.outcome is Outcome.CONSISTENT and report.exit_code == 0


def test_mainthm_entry():
    """[DERIVED] both directions consistent on |x - 1/n|."""
    report = run("theorem_verify mainthm family=shifted_abs n_min=32 n_max=64 tol_seq=0.05\n")
    (entry,) = report.entries
    verdicts = dict((name, v) for name, v in entry.rows)
    assert verdicts["conclusion:forward"].ok and verdicts["conclusion:backward"].ok
    assert entry.outcome is Outcome.CONSISTENT and not entry.falsified


def test_mosco_oscillating_entry():
    """[PAPER] Violated with a witness."""
    report = run("mosco_check family=oscillating candidate=zero n_min=16 n_max=32\n")
    (row, *_) = rows(report)
    assert row["verdict"] == "Violated" and row["witness_x"] and row["witness_n"]
    assert report.exit_code == 1


def test_failures_are_recorded_and_the_run_continues():
    report = run("normalization_check family=oscillating x0=2 n_min=16 n_max=32\n"
                 "evaluate f=abs x=-3\n")
    first, second = report.entries
    assert first.outcome is Outcome.INCONCLUSIVE and "Mosco" in first.error
    assert second.values["value"] == 3.0
    assert report.exit_code == 2


def test_violated_takes_precedence_over_inconclusive():
    report = run("normalization_check family=oscillating x0=2 n_min=16 n_max=32\n"
                 "limit_mode_check mode=envelope family=oscillating n_min=16 n_max=32\n")
    assert [e.outcome for e in report.entries] == [Outcome.INCONCLUSIVE, Outcome.VIOLATED]
    assert report.exit_code == 1


def test_line_prox_does_not_depend_on_seed():
    text = HEAD + "prox f=abs x=2 lambda=1\n"
    a = run_suite(parse_config(text), text)
    b = run_suite(parse_config(text).with_overrides(seed=5), text)
    assert csv_text(a) == csv_text(b)


# ---------------------------------------------------------------- emit_report

def test_empty_suite(tmp_path):
    """[TRIVIAL] headers-only csv, empty markdown body."""
    report = run("")
    assert csv_text(report) == ",".join(CSV_COLUMNS) + "\n"
    assert markdown_text(report).strip() == "# Run report"
    emit_report(report, tmp_path, ("csv", "markdown", "plotdata"))
    assert (tmp_path / "report.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"
    assert list((tmp_path / "plotdata").iterdir()) == []


def test_one_prox_entry(tmp_path):
    """[TRIVIAL] one csv row, one (lambda, envelope) series."""
    report = run("prox f=abs x=2 lambda=1\n")
    (row,) = rows(report)
    assert row["operation"] == "prox" and row["verdict"] == "ConsistentWith"
    assert row["witness_lambda"] == "1" and row["runtime_ms"] == ""
    emit_report(report, tmp_path, ("csv", "plotdata"))
    (series,) = (tmp_path / "plotdata").iterdir()
    lines = series.read_text().splitlines()
    assert lines[0].startswith("#") and lines[1].split("\t") == ["1", "1.5"]
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert set(meta["runtime_ms"]) == {"1"} and meta["exit_code"] == 0


def test_mainthm_plotdata(tmp_path):
    """[DERIVED] per-n residual series for convergence plots."""
    report = run("theorem_verify mainthm family=shifted_abs n_min=16 n_max=32 tol_seq=0.1\n")
    emit_report(report, tmp_path, ("plotdata",))
    names = [p.name for p in (tmp_path / "plotdata").iterdir()]
    assert any("prox_residual" in n for n in names)
    assert not (tmp_path / "report.csv").exists()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        emit_report(run(""), blocker / "sub", ("csv",))


def test_csv_numbers_use_round_trip_precision():
    report = run("envelope f=abs x=0.1 lambda=0.3\n")
    (row,) = rows(report)
    assert float(row["witness_lambda"]) == 0.3 and row["witness_lambda"] == "0.29999999999999999"
