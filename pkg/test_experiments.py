#!/usr/bin/env python3
import json
import math

import pytest

import LPLab
from LPLab.table import HEADER


@pytest.fixture(scope="module")
def config(tmp_path_factory):
    return LPLab.ExperimentConfig(out=str(tmp_path_factory.mktemp("results")))


@pytest.fixture(scope="module")
def lab(config):
    return LPLab.setup_lab(config)


@pytest.fixture(scope="module")
def results(config, lab):
    return LPLab.run(config, "all", lab=lab)


def test_config_defaults():
    config = LPLab.ExperimentConfig()
    assert (config.n, config.L, config.N, config.Jmax) == (1, 64.0, 2**20, 12)
    assert config.J_sweep == [4, 6, 8, 10]
    assert config.cases == ["PLT", "PGT"]
    assert (0.0, math.inf, 1.0) in config.norm_params


def test_config_validation(tmp_path):
    with pytest.raises(ValueError, match="Unknown config key: bogus"):
        LPLab.ExperimentConfig.fromDict({"bogus": 1})
    with pytest.raises(ValueError):
        LPLab.ExperimentConfig(J_sweep=[6, 4])
    with pytest.raises(ValueError):
        LPLab.ExperimentConfig(J_sweep=[4, 12])
    with pytest.raises(ValueError):
        LPLab.ExperimentConfig(Jmax_sweep=[2, 6])
    with pytest.raises(ValueError):
        LPLab.ExperimentConfig(cases=["XYZ"])
    with pytest.raises(ValueError):
        LPLab.ExperimentConfig(seed=-1)
    assert LPLab.ExperimentConfig(cases=["plt"]).cases == ["PLT"]
    path = tmp_path / "config.json"
    path.write_text("[1, 2]")
    with pytest.raises(ValueError):
        LPLab.ExperimentConfig.fromFile(str(path))


def test_config_file(tmp_path):
    path = tmp_path / "config.json"
    data = {"Jmax": 10, "J_sweep": [2, 8], "norm_params": [[0, "inf", 1]]}
    path.write_text(json.dumps(data))
    config = LPLab.ExperimentConfig.fromFile(str(path))
    assert config.Jmax == 10
    assert config.norm_params == [(0.0, math.inf, 1.0)]
    data = config.toDict()
    assert data["norm_params"] == [["0", "inf", "1"]]
    assert LPLab.ExperimentConfig.fromDict(json.loads(json.dumps(data))) == config


def test_table_rows(tmp_path):
    values = dict(
        experiment="tl-diverge",
        case="PGT",
        s=0.0,
        p=math.inf,
        q=1.0,
        J=4,
        besov_f=0.5,
        tl_f=0.75,
        besov_Tf=0.5,
        tl_Tf=1.25,
        oracle_tl_Tf_lo=1.0,
        oracle_tl_Tf_hi=2.0,
        K_emp=None,
        boundary_ok=True,
    )
    row = LPLab.NormRow(**values)
    assert row.tlRatio == pytest.approx(5 / 3)
    assert row.besovRatio == 1.0
    path = tmp_path / "norms.csv"
    LPLab.emit(LPLab.NormTable([row]), str(path))
    lines = path.read_text().split("\n")
    assert lines[0] == ",".join(HEADER)
    assert lines[1] == "tl-diverge,PGT,0,inf,1,4,0.5,0.75,0.5,1.25,1,2,,true"
    assert LPLab.read_table(str(path)) == [row]
    with pytest.raises(ValueError):
        LPLab.NormRow(**dict(values, oracle_tl_Tf_lo=3.0))
    with pytest.raises(ValueError):
        LPLab.NormRow(**dict(values, extra=1))
    missing = dict(values)
    del missing["K_emp"]
    with pytest.raises(ValueError):
        LPLab.NormRow(**missing)
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        LPLab.read_table(str(path))


def test_report():
    report = LPLab.Report(
        [
            LPLab.Check("a", 1.0, "<= 2", True),
            LPLab.Check("b", 0.3, "-", None, "recorded"),
        ]
    )
    assert report.passed
    assert report.lines()[1] == "b: measured=0.3 bound=- recorded"
    report.append(LPLab.Check("c", 3.0, "<= 2", False))
    assert not report.passed
    assert [check.name for check in report.failures] == ["c"]
    assert report.toJson()["checks"][2]["status"] == "FAIL"


def test_unknown_experiment(config, lab):
    with pytest.raises(ValueError):
        LPLab.run(config, "nothing", lab=lab, write=False)


def test_all_checks_pass(results):
    table, report = results
    assert report.failures == []
    names = {check.name.split("[")[0] for check in report}
    for name in [
        "family.telescoping",
        "decay.slope",
        "besov.spread",
        "besov.jmax_spread",
        "besov.random",
        "tl.increasing",
        "tl.growth",
        "lower_bound.K_emp",
        "multiplier.gradient_identity",
        "multiplier.finite_difference",
        "disjoint_sum.ratio",
        "conv_ineq",
        "vector.growth",
    ]:
        assert name in names


def test_table_contents(results, config):
    table, _ = results
    assert len(table.select("tl-diverge")) == 4 * len(config.J_sweep)
    for row in table:
        assert row["boundary_ok"]
        assert row["oracle_tl_Tf_lo"] <= row["oracle_tl_Tf_hi"]
    plt = table.select("tl-diverge", case="PLT", p=1.0, q=2.0)
    assert [row["J"] for row in plt] == config.J_sweep
    ratios = [row.tlRatio for row in plt]
    assert ratios == sorted(ratios)
    assert ratios[-1] / ratios[0] == pytest.approx(1.5028, rel=config.divergence_rtol)
    for row in table.select("besov-bound"):
        assert row.besovRatio <= config.besov_max


def test_outputs_written(results, config):
    table, report = results
    written = LPLab.read_table(config.out + "/norms.csv")
    assert len(written) == len(table)
    with open(config.out + "/report.txt") as fh:
        assert fh.read().splitlines() == report.lines()
    with open(config.out + "/report.json") as fh:
        data = json.load(fh)
    assert data["passed"] is True
    assert len(data["checks"]) == len(report)


def test_deterministic(config, lab, tmp_path):
    outputs = []
    for name in ["first", "second"]:
        out = str(tmp_path / name)
        LPLab.run(config.replace(out=out), "disjoint-sum", lab=lab)
        with open(out + "/report.json") as fh:
            outputs.append(fh.read())
    assert outputs[0] == outputs[1]


def test_truncated_labs(lab):
    assert lab.atJmax(lab.fam.Jmax) is lab
    small = lab.atJmax(6)
    assert small is lab.atJmax(6)
    assert small.fam.Jmax == 6
    assert small.grid.L == lab.grid.L and small.grid.N == 2**14
    assert small.ys.mu0 == lab.ys.mu0
