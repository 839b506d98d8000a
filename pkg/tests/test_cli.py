"""Command-line surface: value parsing, config handling, deterministic
reports, and exit codes."""

import json
import math

import pytest

from geomphase.cli import (
    build_kwargs,
    load_config,
    main,
    parse_value,
    render_csv,
)
from geomphase.errors import ConfigError


@pytest.mark.parametrize("text,want", [
    ("3", 3),
    ("0.5", 0.5),
    ("-2e-3", -0.002),
    ("true", True),
    ("off", False),
    ("pi", math.pi),
    ("-pi", -math.pi),
    ("0.25pi", 0.25 * math.pi),
    ("-0.5pi", -0.5 * math.pi),
    ("hello", "hello"),
])
def test_parse_scalar(text, want):
    assert parse_value(text) == want


def test_parse_list():
    assert parse_value("1, 2, 3") == (1, 2, 3)
    assert parse_value("0.25pi, 0.5pi") == (0.25 * math.pi, 0.5 * math.pi)
    assert parse_value("1,") == (1,)


def test_load_config_missing(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.cfg"))


def test_build_kwargs_sections(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("[common]\nsteps = 128\n[spin]\ntheta = 0.25pi\n")
    config = load_config(str(cfg))
    kw = build_kwargs("spin", config, {})
    assert kw["steps"] == 128
    # scalar promoted to the sequence the experiment expects
    assert kw["theta"] == (0.25 * math.pi,)


def test_build_kwargs_rejects_unknown(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("[spin]\nbogus = 1\n")
    with pytest.raises(ConfigError):
        build_kwargs("spin", load_config(str(cfg)), {})


def test_build_kwargs_cli_override(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("[spin]\nsteps = 128\n")
    kw = build_kwargs("spin", load_config(str(cfg)), {"steps": 64, "tol": None})
    assert kw["steps"] == 64
    assert "tol" not in kw


def test_list_command(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("spin", "ring-static", "convergence"):
        assert name in out


def test_unknown_experiment_exits_2(capsys):
    assert main(["run", "nonsense"]) == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("[spin]\nbogus = 1\n")
    assert main(["run", "spin", "--config", str(cfg)]) == 2


def test_run_json_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["run", "spin", "--steps", "256", "--tol", "1e-3", "--output"]
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0
    d1, d2 = json.loads(out1.read_text()), json.loads(out2.read_text())
    d1.pop("meta"), d2.pop("meta")
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)


def test_run_failure_exits_1(tmp_path):
    out = tmp_path / "a.json"
    code = main(["run", "spin", "--steps", "256", "--tol", "1e-30",
                 "--output", str(out)])
    assert code == 1
    d = json.loads(out.read_text())
    assert d["runs"][0]["converged"] is False


def test_run_csv(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["run", "spin", "--steps", "256", "--tol", "1e-3",
                 "--format", "csv", "--output", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "experiment,field,key,value"
    assert any(line.startswith("spin,deviation,") for line in lines[1:])
    assert any(line.startswith("spin,converged,") for line in lines[1:])


def test_run_parallel_two_experiments(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("[common]\nsteps = 256\ntol = 1e-3\n[ring-static]\nn = 0\n")
    out = tmp_path / "a.json"
    code = main(["run", "spin", "ring-static", "--config", str(cfg),
                 "--parallel", "--output", str(out)])
    assert code == 0
    d = json.loads(out.read_text())
    assert [r["experiment"] for r in d["runs"]] == ["spin", "ring-static"]


def test_render_csv_sorted():
    runs = [{"experiment": "x", "converged": True,
             "deviations": {"b": 2.0, "a": 1.0}, "results": {}}]
    body = render_csv(runs)
    assert body.index("x,deviation,a") < body.index("x,deviation,b")
