import json

import pytest

from bfeopt.cli import main


def _optimize(tmp_path, name, extra=()):
    out = tmp_path / name
    argv = ["optimize", "--optimizer", "bfe", "--problem", "linreg",
            "--seed", "42", "--max-steps", "40", "--n-samples", "2000",
            "--out", str(out)] + list(extra)
    assert main(argv) == 0
    return out.read_bytes()


def test_optimize_writes_deterministic_trace(tmp_path, capsys):
    a = _optimize(tmp_path, "a.csv")
    b = _optimize(tmp_path, "b.csv")
    assert a == b
    assert b"step,batch_loss,full_loss,eta,inner_loops,grad_norm" in a
    out = capsys.readouterr().out
    assert "mean_inner_loops=" in out


def test_optimize_seed_changes_trace(tmp_path):
    a = _optimize(tmp_path, "a.csv")
    c = _optimize(tmp_path, "c.csv", ["--seed", "43"])
    assert a != c


def test_summary_subcommand(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["optimize", "--problem", "quadratic", "--optimizer", "sgd",
                 "--alpha", "0.1", "--curvatures", "1.0", "--theta0", "1.0",
                 "--max-steps", "100", "--lim-zero", "1e-9",
                 "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["summary", "--trace", str(out),
                 "--loss-threshold", "1e-3"]) == 0
    text = capsys.readouterr().out
    assert "steps_to_threshold=" in text
    assert "none" not in text.splitlines()[0]


def test_summary_missing_file_is_config_error(capsys):
    assert main(["summary", "--trace", "/nonexistent/trace.csv",
                 "--loss-threshold", "1.0"]) == 2


def test_compare_subcommand(tmp_path, capsys):
    cfgs = [{"optimizer": "sgd", "problem": "quadratic", "alpha": 0.1,
             "curvatures": [1.0], "theta0": [1.0], "max_steps": 300,
             "lim_zero": 1e-12},
            {"optimizer": "bfe", "problem": "quadratic",
             "curvatures": [1.0], "theta0": [1.0], "max_steps": 300,
             "lim_zero": 1e-12}]
    path = tmp_path / "cfgs.json"
    path.write_text(json.dumps(cfgs))
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--configs", str(path),
                 "--loss-threshold", "1e-6", "--out", str(out)]) == 0
    table = out.read_text()
    assert table == capsys.readouterr().out
    assert "sgd/bfe," in table


def test_compare_bad_json_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["compare", "--configs", str(path),
                 "--loss-threshold", "1.0"]) == 2


def test_compare_unknown_field_exits_2(tmp_path, capsys):
    path = tmp_path / "cfgs.json"
    path.write_text(json.dumps([{"optimizer": "sgd", "frobnicate": 1}]))
    assert main(["compare", "--configs", str(path),
                 "--loss-threshold", "1.0"]) == 2


def test_bad_theta0_dimension_exits_2(capsys):
    assert main(["optimize", "--problem", "quadratic",
                 "--curvatures", "1.0,2.0", "--theta0", "1.0"]) == 2


def test_optimizer_failure_exits_3(tmp_path, capsys):
    # adabfe on the unnormalized regression problem stalls on the bias
    # dimension once the weight freezes; the runner must surface that
    assert main(["optimize", "--optimizer", "adabfe", "--problem", "linreg",
                 "--seed", "42", "--max-steps", "50",
                 "--n-samples", "2000"]) == 3
    assert "optimizer failure" in capsys.readouterr().err
