import json
import subprocess
import sys

import pytest

from qduality.cli import main
from qduality.config import ConfigError, RunConfig, parse_config
from qduality.runner import WORKERS_ENV, case_rng, plan_cases, run, worker_count

EXAMPLE4 = {"q": 0.3, "a": [0.17, 0.59, 1.13], "b": [0.23, 0.71, 1.37], "m": [0, 1, 1], "n": [0, 0, 1], "t": 1}


def write(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def test_defaults(tmp_path):
    config = parse_config(write(tmp_path, {"mode": "theorem1"}))
    assert config.tol == 1e-8
    assert config.samples == 50
    assert config.sweep.q == [0.5]
    assert config.sweep.r == [2, 3, 4]
    assert config.z_samples_per_case == 5


def test_complex_numbers_as_pairs(tmp_path):
    config = parse_config(write(tmp_path, {"mode": "beta", "params": {**EXAMPLE4, "q": [0.3, 0.1]}}))
    assert config.params.q == 0.3 + 0.1j
    assert config.model_dump(mode="json")["params"]["q"] == [0.3, 0.1]


@pytest.mark.parametrize(
    "data, where",
    [
        ({"mode": "theorem1", "samples": -3}, "samples"),
        ({"mode": "theorem1", "colour": 1}, "colour"),
        ({"mode": "theorem1", "sweep": {"q": [1.5]}}, "sweep"),
        ({"mode": "theorem1", "sweep": {"rs_pairs": [[2, 2]]}}, "sweep"),
        ({"mode": "nonsense"}, "mode"),
        ({"mode": "beta", "params": {**EXAMPLE4, "m": [0, 1]}}, "params"),
        ({"mode": "theorem1", "seed": -1}, "seed"),
    ],
)
def test_schema_errors_name_the_field(tmp_path, data, where):
    with pytest.raises(ConfigError, match=where):
        parse_config(write(tmp_path, data))


def test_syntax_errors_give_a_position(tmp_path):
    with pytest.raises(ConfigError, match=r"run.json:2:\d+"):
        parse_config(write(tmp_path, '{"mode": "theorem1",\n  "samples": }'))
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.json")


def test_overrides_are_revalidated():
    config = RunConfig(mode="theorem1")
    assert config.with_overrides(samples=7, seed=None).samples == 7
    with pytest.raises(ValueError):
        config.with_overrides(samples=0)


def test_sizes_cycle_evenly():
    plans = plan_cases(RunConfig(mode="theorem1", samples=9, sweep={"r": [2, 3, 4]}))
    assert [p.r for p in plans] == [2, 3, 4] * 3
    assert plans[4].case_id == "theorem1-00004"
    plans = plan_cases(RunConfig(mode="confluent", samples=6))
    assert [(p.r, p.s) for p in plans] == [(2, 1), (3, 1), (3, 2)] * 2
    assert plan_cases(RunConfig(mode="beta", params=EXAMPLE4, samples=20))[0].r == 3


def test_case_streams_are_independent_of_the_sample_count():
    short = run(RunConfig(mode="theorem1", samples=3, seed=5), workers=1)
    long = run(RunConfig(mode="theorem1", samples=6, seed=5), workers=1)
    assert [r.residuals for r in short.records] == [r.residuals for r in long.records[:3]]
    assert case_rng(5, 1).random() != case_rng(5, 2).random()


def test_beta_mode_sees_theorem_parameters():
    a = run(RunConfig(mode="theorem1", samples=3, seed=9), workers=1)
    b = run(RunConfig(mode="beta", samples=3, seed=9), workers=1)
    assert [r.params for r in a.records] == [r.params for r in b.records]


def test_parallel_run_matches_serial():
    config = RunConfig(mode="confluent", samples=6, seed=3)
    serial = run(config, workers=1)
    parallel = run(config, workers=2)
    assert [r.to_dict() for r in serial.records] == [r.to_dict() for r in parallel.records]


def test_worker_count(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert worker_count() == 1
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert worker_count() == 4
    for bad in ("0", "many"):
        monkeypatch.setenv(WORKERS_ENV, bad)
        with pytest.raises(ValueError):
            worker_count()


def test_verify_writes_reports(tmp_path, capsys):
    cfg = write(tmp_path, {"mode": "theorem1", "samples": 50, "seed": 1})
    out = tmp_path / "out" / "report.json"
    assert main(["verify", "--config", str(cfg), "--samples", "4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["n_cases"] == 4 and doc["config"]["samples"] == 4
    lines = out.with_suffix(".jsonl").read_text().splitlines()
    assert len(lines) == 5 and "summary" in json.loads(lines[-1])
    assert "theorem1: 4 cases, 4 pass" in capsys.readouterr().out


def test_verify_exit_code_on_failure(tmp_path, capsys):
    cfg = write(tmp_path, {"mode": "theorem1", "samples": 2, "tol": 1e-30})
    assert main(["verify", "--config", str(cfg)]) == 1
    assert "FAIL theorem1-00000" in capsys.readouterr().out


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, {"mode": "theorem1", "samples": -1})
    assert main(["verify", "--config", str(cfg)]) == 2
    assert "samples" in capsys.readouterr().err


def test_bad_worker_env_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "zero")
    cfg = write(tmp_path, {"mode": "theorem1", "samples": 2})
    assert main(["verify", "--config", str(cfg)]) == 2


def test_examples_command(capsys):
    assert main(["examples"]) == 0
    assert "examples: 10 cases, 10 pass" in capsys.readouterr().out


def test_beta_command(tmp_path, capsys):
    cfg = write(tmp_path, {"mode": "beta", "params": EXAMPLE4})
    out = tmp_path / "beta.json"
    assert main(["beta", "--config", str(cfg), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "  -1" in text and "   0" in text
    coeffs = json.loads(out.read_text())["beta"]["coeffs"]
    assert abs(coeffs["-1"][0] - 1.5114495216129993) < 1e-12


def test_beta_command_needs_params(tmp_path):
    assert main(["beta", "--config", str(write(tmp_path, {"mode": "beta"}))]) == 2


def test_alpha_command(tmp_path, capsys):
    cfg = write(tmp_path, {"mode": "alpha", "params": EXAMPLE4})
    assert main(["alpha", "--config", str(cfg), "--k", "0"]) == 0
    assert "(pass)" in capsys.readouterr().out
    assert main(["alpha", "--config", str(cfg), "--k", "-5"]) == 2


def test_module_entry_point(tmp_path):
    done = subprocess.run([sys.executable, "-m", "qduality", "--help"], capture_output=True, text=True)
    assert done.returncode == 0 and "verify" in done.stdout and WORKERS_ENV in done.stdout
