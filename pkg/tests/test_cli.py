from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from looproot.cli import main
from looproot.loop_classifier import enumerate_loop_subsystems
from looproot.root_core import generate_root_system, validate_gcm


def cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path: Path, name: str, obj) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


@pytest.fixture
def b2_file(tmp_path):
    return write(tmp_path, "b2.json", {"labels": ["a", "b"], "matrix": [[2, -1], [-2, 2]]})


@pytest.fixture
def g2_file(tmp_path):
    return write(tmp_path, "g2.json", {"labels": ["a", "b"], "matrix": [[2, -1], [-3, 2]]})


def test_census_matches_library(capsys, b2_file):
    code, out, _ = cli(capsys, "census", "--gcm", b2_file, "--modulus-bound", "2")
    assert code == 0
    payload = json.loads(out)
    rs = generate_root_system(validate_gcm([[2, -1], [-2, 2]], ["a", "b"]))
    expected = enumerate_loop_subsystems(rs, 2)
    assert payload["count"] == len(expected) == len(payload["pairs"])
    assert all(row["verified"] for row in payload["pairs"])
    assert [{k: v for k, v in row.items() if k != "verified"} for row in payload["pairs"]] == [
        p.to_record() for p in expected
    ]


def test_census_output_is_deterministic(capsys, b2_file):
    first = cli(capsys, "census", "--gcm", b2_file, "--modulus-bound", "2")[1]
    second = cli(capsys, "census", "--gcm", b2_file, "--modulus-bound", "2", "--parallelism", "4")[1]
    assert first == second


def test_scalings_g2(capsys, g2_file):
    code, out, _ = cli(capsys, "scalings", "--gcm", g2_file)
    assert code == 0
    payload = json.loads(out)
    assert payload["padic"] == [[1, 1], [1, 3]]
    assert payload["closed_form"] == [[1, 1], [1, 3]]
    assert payload["equal"] is True


def test_scalings_per_subsystem(capsys):
    code, out, _ = cli(capsys, "scalings", "--type", "b2", "--per-subsystem")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == 7
    assert all(rec["equal"] for rec in payload["subsystems"])


def test_roots_tsv(capsys):
    code, out, _ = cli(capsys, "roots", "--type", "a1~", "--height-bound", "3", "--format", "tsv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].split("\t")[:3] == ["root", "coroot", "height"]
    assert len(lines) == 1 + 8


def test_build_classify_verify_pipeline(capsys, tmp_path, b2_file):
    pair = {
        "support": [[1, 0], [0, 1], [1, 1], [2, 1], [-1, 0], [0, -1], [-1, -1], [-2, -1]],
        "m": {"a": 1, "b": 2},
        "xbar": {"a": 0, "b": 1},
    }
    code, out, _ = cli(capsys, "build", "--gcm", b2_file, "--input", write(tmp_path, "pair.json", pair))
    assert code == 0
    family_path = write(tmp_path, "family.json", json.loads(out))
    code, out, _ = cli(capsys, "classify", "--gcm", b2_file, "--input", family_path)
    assert code == 0
    back = json.loads(out)
    assert back["m"] == pair["m"] and back["xbar"] == pair["xbar"]
    code, out, _ = cli(capsys, "verify", "--gcm", b2_file, "--input", family_path, "--oracle", "--window", "12")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] and payload["oracle"]["agree"]


def test_verify_corrupted_family(capsys, tmp_path):
    family = {
        "entries": [
            {"root": [1, 0], "offset": 1, "modulus": 0},
            {"root": [0, 1], "offset": 0, "modulus": 0},
            {"root": [1, 1], "offset": 0, "modulus": 0},
            {"root": [-1, 0], "offset": -1, "modulus": 0},
            {"root": [0, -1], "offset": 0, "modulus": 0},
            {"root": [-1, -1], "offset": 0, "modulus": 0},
        ]
    }
    path = write(tmp_path, "bad.json", family)
    code, out, err = cli(capsys, "verify", "--type", "a2", "--input", path, "--oracle", "--window", "12")
    assert code == 1
    assert "VerificationFailed" in err
    payload = json.loads(out)
    assert not payload["ok"]
    assert "alpha=" in payload["failures"][0] and "beta=" in payload["failures"][0]


def test_domain_errors_name_the_module_error(capsys, tmp_path):
    bad = write(tmp_path, "bad.json", {"matrix": [[2, -1], [0, 2]]})
    code, _, err = cli(capsys, "roots", "--gcm", bad)
    assert code == 1 and err.startswith("AsymmetricZero:")
    code, _, err = cli(capsys, "roots", "--type", "a1~")
    assert code == 1 and err.startswith("SafetyCapExceeded:")
    floats = write(tmp_path, "float.json", {"matrix": [[2.0, -1], [-1, 2]]})
    code, _, err = cli(capsys, "roots", "--gcm", floats)
    assert code == 1 and err.startswith("MalformedInput:")


def test_usage_errors(capsys, tmp_path):
    assert cli(capsys, "census", "--type", "a1")[0] == 2
    assert cli(capsys, "verify", "--type", "a1")[0] == 2
    assert cli(capsys, "roots", "--gcm", str(tmp_path / "missing.json"))[0] == 2
    assert cli(capsys, "census", "--type", "a1", "--modulus-bound", "0")[0] == 2


def test_verbose_goes_to_stderr_only(capsys):
    quiet = cli(capsys, "roots", "--type", "a2")
    loud = cli(capsys, "roots", "--type", "a2", "--verbose")
    assert quiet[1] == loud[1]
    assert quiet[2] == "" and "finished" in loud[2]


def test_module_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "looproot", "subsystems", "--type", "b2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["count"] == 8
