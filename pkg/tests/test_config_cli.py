import json
import math

import numpy as np
import pytest

from homfrac.cli import main
from homfrac.config import (ConfigError, ExperimentConfig, config_hash, dump_config,
                            load_config)
from homfrac.funcspace import load_grid_function


def write(tmp_path, text):
    p = tmp_path / "cfg.yaml"
    p.write_text(text)
    return str(p)


def test_defaults_roundtrip():
    cfg = load_config()
    again = load_config(text=dump_config(cfg))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)


def test_inf_roundtrip():
    cfg = load_config(text="exponents: {s: inf}\n")
    assert cfg.exponents.s == math.inf
    assert cfg.to_dict()["exponents"]["s"] == "inf"
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("text, match", [
    ("bogus: 1\n", "unknown key"),
    ("operator: {alpha: 1.0, gamma: 2}\n", "operator.gamma"),
    ("resolution: 1.5\n", "integer"),
    ("kernel: {name: spiral}\n", "unknown kernel"),
    ("operator: {alpha: 3.0}\n", "alpha"),
    ("operator: {alpha: 0.5}\nexponents: {p: 2.0, q: 3.0}\n", "expected q = 4"),
    ("operator: {alpha: 1.0}\nexponents: {p: 2.0, s: 1.5}\n", r"n/\(n-alpha\)"),
    ("suites: [nope]\n", "unknown suite"),
    ("sweep: {beta: [1]}\n", "unknown parameter"),
    ("exponents: {kappa: 1.5}\n", "kappa"),
    ("resolution: 66\n", "multiple"),
    ("norm: {ball: {centre: [0, 0]}}\n", "radius"),
    ("[1, 2]\n", "mapping"),
])
def test_validation_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        load_config(text=text)


def test_hash_changes_with_content():
    a = load_config(text="seed: 1\n")
    b = load_config(text="seed: 2\n")
    assert config_hash(a) != config_hash(b)


def test_list_suites(capsys):
    assert main(["list-suites"]) == 0
    assert "hedberg" in capsys.readouterr().out.split()


def test_validate_config_reports_json_error(tmp_path, capsys):
    path = write(tmp_path, "operator: {alpha: 0.5}\nexponents: {p: 2.0, q: 3.0}\n")
    assert main(["validate-config", "--config", path]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "validation" and "expected q = 4" in err["message"]


def test_missing_config_file(tmp_path, capsys):
    assert main(["validate-config", "--config", str(tmp_path / "none.yaml")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["verify", "nope"])
    assert e.value.code == 2


def test_eval_writes_field_and_slices(tmp_path):
    path = write(tmp_path, "resolution: 64\noperator: {alpha: 1.0}\n")
    out = tmp_path / "out"
    assert main(["eval", "--config", path, "--out", str(out)]) == 0
    F = load_grid_function(out / "riesz")
    assert F.values.shape == (16, 16)
    lines = (out / "riesz_slice_x0.csv").read_text().splitlines()
    assert lines[0] == "x0,value" and len(lines) == 17
    # the indicator's potential peaks near the centre at about 1
    assert np.max(F.values) == pytest.approx(1.0, rel=3e-2)


def test_eval_needs_alpha(tmp_path, capsys):
    assert main(["eval", "--resolution", "32", "--out", str(tmp_path)]) == 2
    assert "needs operator.alpha" in capsys.readouterr().err


def test_norm_command(tmp_path, capsys):
    path = write(tmp_path, "resolution: 64\nnorm: {kind: lp, p: 2.0}\n")
    assert main(["norm", "--config", path, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "norm.csv").read_text().splitlines()
    value = float(text[1].split(",")[-1])
    assert value == pytest.approx(math.sqrt(math.pi), rel=2e-2)


def test_verify_is_deterministic(tmp_path):
    path = write(tmp_path, "resolution: 32\n")
    for d in ("a", "b"):
        assert main(["verify", "embeddings", "--config", path, "--out", str(tmp_path / d)]) == 0
    for name in ("embeddings.csv", "embeddings.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    doc = json.loads((tmp_path / "a" / "embeddings.json").read_text())
    assert doc["verdict"] == "pass"
    assert len(doc["provenance"]["input_sha256"]) == 64


def test_sweep_writes_plot_tables(tmp_path):
    path = write(tmp_path, "resolution: 32\n")
    rc = main(["sweep", "dini-lemma", "--config", path, "--out", str(tmp_path),
               "--grid", "alpha=0.5,1.0"])
    assert rc == 0
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert rows[0].startswith("alpha,suite,check_id")
    plot = tmp_path / "plot_dini-lemma_kernel-shift_cos_alpha.csv"
    assert len(plot.read_text().splitlines()) == 3


def test_sweep_bad_grid(tmp_path, capsys):
    assert main(["sweep", "dini-lemma", "--out", str(tmp_path), "--grid", "beta=1"]) == 2
