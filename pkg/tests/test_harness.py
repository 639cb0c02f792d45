import csv
import json

import pytest

from primalgap import harness
from primalgap.harness import (EXPERIMENTS, RESULT_COLUMNS, ExperimentConfig, ExperimentResult, fmt,
                               load_config, main, make_config, run_experiment)


def small(exp, tmp_path, **kw):
    return ExperimentConfig(experiment=exp, out=str(tmp_path), **kw)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_config_digest_ignores_threads_and_out():
    a = ExperimentConfig("example31", trials=10, seed=1, threads=1, out="x")
    b = ExperimentConfig("example31", trials=10, seed=1, threads=8, out="y")
    assert a.digest() == b.digest()
    assert a.digest() != ExperimentConfig("example31", trials=10, seed=2).digest()
    assert a.digest() != ExperimentConfig("example31", trials=10, seed=1, params={"lam": 3.0}).digest()


def test_make_config_splits_params():
    cfg = make_config({"experiment": "example31", "trials": 7, "lam": 3.0, "n": None})
    assert cfg.trials == 7 and cfg.n is None and cfg.params == {"lam": 3.0}


def test_load_config_rejects_nested(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": "example31", "problem": {"n": 3}}))
    with pytest.raises(ValueError):
        load_config(p)
    p.write_text("[1, 2]")
    with pytest.raises(ValueError):
        load_config(p)


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(3) == "3" and fmt(True) == "true" and fmt(None) == ""


def test_outputs_and_columns(tmp_path):
    cfg = small("example31", tmp_path, trials=50)
    result, paths = run_experiment(cfg)
    rows = read_rows(paths["results"])
    assert rows[0] == RESULT_COLUMNS
    assert {r[7] for r in rows[1:]} == {cfg.digest()}
    assert any(r[2] == "mean" for r in rows[1:]) and any(r[2] == "std_error" for r in rows[1:])
    per_trial = [r for r in rows[1:] if r[1] == "primal_min_error" and r[2].isdigit()]
    assert len(per_trial) == 50
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["digest"] == cfg.digest()
    assert {"config", "wall_time_s", "library_version"} <= set(manifest)
    summary = json.loads(paths["summary"].read_text())
    assert {e["metric"] for e in summary["estimates"]} >= {"population_gap_at_erm", "gen_error_primal_risk"}
    assert set(result.checks) == set(summary["checks"])


@pytest.mark.parametrize("exp,kw", [
    ("example31", dict(trials=40)),
    ("example41", dict(trials=20, params={"ns": [9]})),
    ("gda-vs-gdmax", dict(trials=30)),
    ("stability-scan", dict(trials=10, params={"ns": [20, 40], "Ts": [3]})),
])
def test_rerun_byte_identical_and_thread_independent(exp, kw, tmp_path):
    a = run_experiment(small(exp, tmp_path / "a", **kw))[1]
    b = run_experiment(small(exp, tmp_path / "b", **kw))[1]
    c = run_experiment(small(exp, tmp_path / "c", threads=4, **kw))[1]
    for key in ("results", "summary"):
        assert a[key].read_bytes() == b[key].read_bytes() == c[key].read_bytes()


def test_unknown_experiment(tmp_path):
    with pytest.raises(KeyError):
        run_experiment(small("nope", tmp_path))
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"experiment": "nope"}))
    assert main(["--config", str(cfgfile), "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit):
        main(["--experiment", "nope"])


def test_missing_experiment_flag():
    assert main([]) == 1


def test_config_file_with_flag_override(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"experiment": "example31", "trials": 500, "seed": 4}))
    out = tmp_path / "o"
    assert main(["--config", str(cfgfile), "--trials", "30", "--out", str(out)]) == 0
    manifest = json.loads((out / "example31.manifest.json").read_text())
    assert manifest["config"]["trials"] == 30 and manifest["config"]["seed"] == 4


def test_check_exit_codes(tmp_path, monkeypatch):
    def failing(cfg):
        res = ExperimentResult()
        res.add_value("x", 1.0, 1, 1, cfg.seed)
        res.checks["always fails"] = False
        return res

    def passing(cfg):
        res = ExperimentResult()
        res.add_value("x", 1.0, 1, 1, cfg.seed)
        res.checks["always passes"] = True
        return res

    monkeypatch.setitem(EXPERIMENTS, "failing", failing)
    monkeypatch.setitem(EXPERIMENTS, "passing", passing)
    assert main(["--experiment", "failing", "--out", str(tmp_path), "--check"]) == 2
    assert main(["--experiment", "failing", "--out", str(tmp_path)]) == 0
    assert main(["--experiment", "passing", "--out", str(tmp_path), "--check"]) == 0


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["--experiment", "bounds-report", "--out", str(blocker / "sub")]) == 1


def test_bounds_report_table(tmp_path):
    result, paths = run_experiment(small("bounds-report", tmp_path))
    tables = [k for k in paths if k not in ("results", "summary", "manifest")]
    assert tables
    header = read_rows(paths[tables[0]])[0]
    assert {"bound_name", "paper_location", "inputs_digest", "value"} <= set(header)


def test_every_experiment_registered():
    assert set(EXPERIMENTS) >= {"example31", "example41", "gda-vs-gdmax", "stability-scan", "ppa-rate",
                                "gan-capacity", "bounds-report", "lemma-suites"}
    assert harness.build_parser().parse_args(["--experiment", "ppa-rate"]).experiment == "ppa-rate"
