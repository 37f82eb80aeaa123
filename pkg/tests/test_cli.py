# tests/test_cli.py
import json
import os
import shutil
import subprocess
import sys

import pytest

from src.cli import main, parse_d_range
from src.core.config import REPO_ROOT, Settings
from src.core.exceptions import UsageError
from src.schemas.reports import RunConfig
from src.services.report_builder import ReportBuilder

MODEL_DIR = REPO_ROOT / "models"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_d_range():
    assert parse_d_range("3..7") == (3, 7)
    assert parse_d_range("5") == (5, 5)


def test_singdeg_json(capsys):
    code, out, _ = run(capsys, "singdeg", "--surface", "quartic", "--d", "3..5")
    rows = json.loads(out)

    assert code == 0
    assert [row["value"] for row in rows] == [40, 60, 88]
    assert set(rows[0]) == {"surface", "d", "quantity", "value", "status", "provenance"}


def test_dims_csv(capsys):
    code, out, _ = run(capsys, "dims", "--surface", "2-3", "--d", "3..5", "--format", "csv")
    lines = out.strip().splitlines()

    assert code == 0
    assert lines[0] == "surface,d,quantity,value,status,provenance"
    assert "2-3,3,h0_foliations,10,Determined,chase" in lines
    assert "2-3,5,h0_foliations,76,Determined,chase" in lines


def test_dims_markdown(capsys):
    code, out, _ = run(capsys, "dims", "--surface", "quartic", "--d", "6", "--format", "md")
    assert code == 0
    assert out.startswith("|")
    assert "h0_foliations" in out


def test_dims_fit(capsys):
    code, out, _ = run(capsys, "dims", "--surface", "quartic", "--d", "0..12", "--fit")
    fits = [row for row in json.loads(out) if row["quantity"] == "h0_foliations_fit"]

    assert code == 0
    assert {"d": 6, "value": "4*d**2 - 8*d - 16 on [6, 12]", "status": "fitted"}.items() <= fits[0].items()
    assert sorted(row["d"] for row in fits if row["status"] == "exceptional") == [0, 1, 2, 3, 4, 5]


def test_single_degree_fit_is_exceptional(capsys):
    code, out, _ = run(capsys, "dims", "--surface", "2-2-2", "--d", "3", "--fit")
    rows = json.loads(out)
    fit = [row for row in rows if row["quantity"] == "h0_foliations_fit"]

    assert code == 0
    assert fit == [{
        "surface": "2-2-2", "d": 3, "quantity": "h0_foliations_fit", "value": 15,
        "status": "exceptional", "provenance": "interpolation",
    }]


def test_all_surfaces_vanish_below_degree_three(capsys):
    code, out, _ = run(capsys, "dims", "--d", "0..2")
    foliations = [row["value"] for row in json.loads(out) if row["quantity"] == "h0_foliations"]

    assert code == 0
    assert foliations == [0] * 9


def test_trace_goes_to_stderr(capsys):
    code, out, err = run(capsys, "dims", "--surface", "quartic", "--d", "5", "--with-trace")

    assert code == 0
    assert "RULE" not in out
    assert any(line.startswith("RULE ") for line in err.splitlines())


def test_uniqueness(capsys):
    code, out, _ = run(capsys, "uniqueness", "--surface", "quartic", "--d", "4..6")
    rows = json.loads(out)
    threshold = next(row for row in rows if row["quantity"] == "uniqueness_threshold")
    verdicts = {row["d"]: row["value"] for row in rows if row["quantity"] == "uniqueness_certificate"}

    assert code == 0
    assert threshold["value"] == 6
    assert verdicts == {4: "Obstructed", 5: "Obstructed", 6: "Certified"}


def test_verify_passes_on_shipped_models(capsys):
    code, out, err = run(capsys, "verify", "--surface", "quartic", "--d", "3..6")

    assert code == 0
    assert "PASS (4/4)" in err
    assert all(row["status"] == "PASS" for row in json.loads(out))


@pytest.mark.parametrize("argv", [
    ["dims", "--d", "5..3"],
    ["dims", "--d", "abc"],
    ["dims", "--surface", "cubic"],
    ["dims", "--format", "xml"],
    ["dims", "--d", "0..100000"],
    [],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 2


def test_corrupted_model_fails_verification(tmp_path):
    for name in ("quadric_cubic.txt", "three_quadrics.txt"):
        shutil.copy(MODEL_DIR / name, tmp_path / name)
    (tmp_path / "quartic.txt").write_text("n=3 degrees=[4]\n1:4,0,0,0\n")
    env = dict(os.environ, KOSZULSCOPE_MODEL_DIR=str(tmp_path), PYTHONIOENCODING="utf-8")

    completed = subprocess.run(
        [sys.executable, "-m", "src.cli", "verify", "--surface", "quartic", "--d", "3..6"],
        cwd=REPO_ROOT, env=env, capture_output=True, text=True, encoding="utf-8",
    )

    assert completed.returncode == 1
    assert "singular" in completed.stderr


def test_degree_cap_follows_the_environment(monkeypatch, capsys):
    monkeypatch.setenv("KOSZULSCOPE_D_CAP", "10")
    with pytest.raises(SystemExit) as excinfo:
        main(["singdeg", "--surface", "quartic", "--d", "0..20"])
    assert excinfo.value.code == 2

    monkeypatch.setenv("KOSZULSCOPE_D_CAP", "300")
    code, out, _ = run(capsys, "singdeg", "--surface", "quartic", "--d", "250")
    assert code == 0
    assert json.loads(out)[0]["value"] == 24 + 249 ** 2 * 4


def test_builder_enforces_its_own_cap():
    with pytest.raises(UsageError):
        ReportBuilder(Settings(d_cap=5)).build(RunConfig(command="singdeg", d_min=0, d_max=10))


def test_unexpected_errors_exit_1(monkeypatch, capsys):
    def broken(self, config):
        raise RuntimeError("worker pool died")

    monkeypatch.setattr(ReportBuilder, "build", broken)
    code, out, err = run(capsys, "singdeg", "--surface", "quartic", "--d", "3")

    assert code == 1
    assert out == ""
    assert "❌ singdeg failed: RuntimeError: worker pool died" in err
