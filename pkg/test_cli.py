#!/usr/bin/env python3
import json

import pytest

from LPLab.__main__ import main, parse_args
from LPLab.table import HEADER

SMALL = {"N": 65536, "Jmax": 8, "J_sweep": [2, 4, 6]}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL))
    return str(path)


def test_parse_args():
    args = parse_args(["tl-diverge", "--seed", "3", "-q"])
    assert args.experiment == "tl-diverge"
    assert args.seed == 3
    assert args.quiet and not args.verbose
    with pytest.raises(SystemExit):
        parse_args(["bogus"])
    with pytest.raises(SystemExit):
        parse_args(["all", "-v", "-q"])


def test_family_check(small_config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["family-check", "--config", small_config, "--out", str(out)]) == 0
    assert (out / "bands.csv").exists()
    assert (out / "norms.csv").read_text() == ",".join(HEADER) + "\n"
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert "family.support" in capsys.readouterr().out


def test_failed_check(tmp_path):
    path = tmp_path / "strict.json"
    path.write_text(json.dumps(dict(SMALL, decay_slope_max=-100.0)))
    assert main(["decay", "--config", str(path), "--out", str(tmp_path / "out"), "-q"]) == 1


def test_invalid_input(small_config, tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"bogus": 1}))
    assert main(["decay", "--config", str(path)]) == 2
    assert "Unknown config key" in capsys.readouterr().err
    assert main(["decay", "--config", small_config, "--seed", "-1"]) == 2
    assert main(["decay", "--config", str(tmp_path / "missing.json")]) == 2


def test_rerun_is_byte_identical(small_config, tmp_path):
    outputs = []
    for name in ["first", "second"]:
        out = tmp_path / name
        main(["tl-diverge", "--config", small_config, "--out", str(out), "-q"])
        outputs.append(((out / "norms.csv").read_bytes(), (out / "report.json").read_bytes()))
    assert outputs[0] == outputs[1]
    assert outputs[0][0].count(b"\n") > 1


def test_equal_exponents_not_applicable(tmp_path):
    path = tmp_path / "equal.json"
    path.write_text(json.dumps(dict(SMALL, norm_params=[[0, 2, 2]])))
    out = tmp_path / "out"
    assert main(["tl-diverge", "--config", str(path), "--out", str(out), "-q"]) == 0
    checks = json.loads((out / "report.json").read_text())["checks"]
    assert [check["name"] for check in checks] == ["tl.divergence[s=0,p=2,q=2]"]
    assert checks[0]["passed"] is None
    assert checks[0]["status"] == "not applicable (p=q)"
    assert (out / "norms.csv").read_text() == ",".join(HEADER) + "\n"
