"""Command-line interface: subcommands, outputs, exit codes."""

import json

import pytest

from perfgan.cli import main


def write_config(tmp_path, **overrides):
    base = {
        "space": [
            {"name": "big_cpus", "levels": [0, 2, 4]},
            {"name": "big_freq", "levels": [500, 1000, 2000]},
            {"name": "big_util", "levels": [0.25, 0.5, 1.0]},
            {"name": "little_cpus", "levels": [0, 2, 4]},
            {"name": "little_freq", "levels": [400, 800, 1500]},
            {"name": "little_util", "levels": [0.25, 0.5, 1.0]},
        ],
        "sut": {"p_idle": 0.5, "kappa_big": 1.0, "kappa_little": 0.15, "gain": 2.0},
        "fitness": {"p_m": 6.0},
        "algorithms": [
            {"kind": "random", "budget": 16, "warmup": 6},
            {"kind": "dn", "budget": 16, "warmup": 6, "batchsize": 4,
             "gan": {"disc_epochs": 2, "gen_epochs": 2}},
            {"kind": "ogan", "budget": 16, "warmup": 6,
             "gan": {"disc_epochs": 2, "gen_epochs": 2}},
        ],
        "runs": 2,
        "master_seed": 5,
        "sma_window": 4,
        "histogram_bins": 10,
    }
    base.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(base))
    return path


def test_version_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip()


def test_help_exits_zero():
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0


def test_compare_writes_outputs(tmp_path):
    config = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["compare", "--config", str(config), "--out", str(out)]) == 0
    for name in ("tests.csv", "summary.json", "histogram.csv", "sma.csv"):
        assert (out / name).exists()


def test_compare_overrides(tmp_path):
    config = write_config(tmp_path)
    out = tmp_path / "out"
    code = main([
        "compare", "--config", str(config), "--out", str(out),
        "--runs", "1", "--master-seed", "99",
    ])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["runs"] == 1
    assert summary["config"]["master_seed"] == 99
    assert len(summary["algorithms"]["random"]["positive_counts"]) == 1


def test_run_single_algorithm(tmp_path):
    config = write_config(tmp_path)
    out = tmp_path / "single"
    code = main([
        "run", "--algorithm", "ogan", "--config", str(config),
        "--seed", "123", "--out", str(out),
    ])
    assert code == 0
    rows = (out / "tests.csv").read_text().splitlines()
    assert len(rows) == 1 + 16
    assert rows[1].split(",")[1] == "ogan"
    assert rows[1].split(",")[2] == "123"


def test_run_missing_kind_is_config_error(tmp_path):
    config = write_config(tmp_path, algorithms=[{"kind": "random", "budget": 16,
                                                 "warmup": 6}])
    code = main([
        "run", "--algorithm", "ogan", "--config", str(config),
        "--seed", "1", "--out", str(tmp_path / "x"),
    ])
    assert code == 1


def test_oracle_prints_facts(tmp_path, capsys):
    config = write_config(tmp_path)
    assert main(["oracle", "--config", str(config)]) == 0
    out = capsys.readouterr().out
    lines = dict(line.split(": ") for line in out.strip().splitlines())
    assert lines["cardinality"] == "729"
    assert int(lines["positives"]) > 0
    assert 0.0 < float(lines["density"]) < 1.0
    assert float(lines["gain"]) == 2.0


def test_bad_config_exits_one(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["oracle", "--config", str(path)]) == 1
    assert "config error" in capsys.readouterr().err


def test_missing_config_exits_one(tmp_path):
    assert main(["oracle", "--config", str(tmp_path / "absent.json")]) == 1


def test_unwritable_output_exits_two(tmp_path):
    config = write_config(tmp_path)
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory")
    code = main(["compare", "--config", str(config), "--out", str(blocker)])
    assert code == 2
