import json
from pathlib import Path

from surropt.cli import main

CFG = """
[data]
source = oracle
problem = zdt1
sampler = lhd
n_samples = 120

[run]
seed = 13
models = gbt
output_dir = {out}

[tuning]
budget = 2
folds = 2

[nsga2]
pop_size = 12
generations = 5

[validation]
mode = oracle
max_candidates = 30
"""


def _write_cfg(tmp_path, out_name="out"):
    cfg = tmp_path / "cfg.ini"
    cfg.write_text(CFG.format(out=tmp_path / out_name), encoding="utf-8")
    return cfg


def test_generate_writes_dataset(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    assert main(["generate", "--config", str(cfg)]) == 0
    assert (tmp_path / "out" / "dataset.csv").exists()
    assert "dataset.csv" in capsys.readouterr().out


def test_full_run_exit_zero(tmp_path):
    cfg = _write_cfg(tmp_path)
    assert main(["run", "--config", str(cfg)]) == 0
    payload = json.loads((tmp_path / "out" / "report.json").read_text())
    assert payload["failed_stage"] is None
    assert payload["completed_stages"][-1] == "report"


def test_subcommand_stops_at_stage(tmp_path):
    cfg = _write_cfg(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    out = tmp_path / "out"
    assert (out / "front_predicted_gbt.csv").exists()
    assert not (out / "indicators.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\nmodels =\n", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_exit_code(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.ini")]) == 2


def test_stage_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "cfg.ini"
    bad.write_text(
        "[data]\nsource = csv\npath = missing.csv\nfeature_columns = 3\n"
        f"[run]\nmodels = gbt\noutput_dir = {tmp_path / 'out'}\n",
        encoding="utf-8",
    )
    assert main(["run", "--config", str(bad)]) == 3


def test_seed_and_out_overrides(tmp_path):
    cfg = _write_cfg(tmp_path)
    override = tmp_path / "elsewhere"
    assert main(["run", "--config", str(cfg), "--seed", "99", "--out", str(override)]) == 0
    payload = json.loads((override / "report.json").read_text())
    assert payload["config"]["run"]["seed"] == 99
