"""Command line interface: outputs, figures, exit codes."""

import json

from convdiff.cli import main
from convdiff.harness import CSV_HEADER
from convdiff.linalg import NumericalError


def test_solve_writes_data_and_figure(tmp_path, capsys):
    out = tmp_path / "sol.txt"
    code = main(["solve", "--problem", "p1", "--scheme", "upwind",
                 "--mesh", "shishkin", "--N", "32", "--eps", "1e-6",
                 "--out", str(out)])
    assert code == 0
    assert out.exists()
    assert out.with_suffix(".png").exists()
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 33
    assert "nodal max error" in capsys.readouterr().out


def test_solve_2d_schemes(tmp_path):
    for scheme in ("fd2d-upwind", "fem-sdfem"):
        out = tmp_path / f"{scheme}.txt"
        code = main(["solve", "--problem", "mms2d", "--scheme", scheme,
                     "--mesh", "shishkin", "--N", "8", "--eps", "1e-4",
                     "--out", str(out)])
        assert code == 0
        blocks = out.read_text().strip().split("\n\n")
        assert len(blocks) == 9
        assert out.with_suffix(".png").exists()


def test_convergence_config_run(tmp_path):
    out = tmp_path / "table.csv"
    cfg = {"problem": "p1", "scheme": "upwind", "mesh": "shishkin",
           "N": [32, 64], "eps": [1e-6], "out": str(out)}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["convergence", "--config", str(cfg_path)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert out.with_suffix(".png").exists()


def test_compare_writes_one_table_per_scheme(tmp_path):
    out = tmp_path / "cmp.csv"
    cfg = {"problem": "p1", "schemes": ["upwind", "central"], "mesh": "shishkin",
           "N": [16, 32], "eps": [1e-6], "out": str(out)}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["compare", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "cmp_upwind.csv").exists()
    assert (tmp_path / "cmp_central.csv").exists()
    assert out.with_suffix(".png").exists()


def test_usage_error_exit_code():
    assert main(["solve", "--problem", "p1", "--scheme", "nope",
                 "--mesh", "uniform", "--N", "4", "--eps", "0.1"]) == 1


def test_unknown_problem_exit_code(tmp_path):
    code = main(["solve", "--problem", "mystery", "--scheme", "upwind",
                 "--mesh", "uniform", "--N", "4", "--eps", "0.1",
                 "--out", str(tmp_path / "x.txt")])
    assert code == 1


def test_incompatible_combination_exit_code(tmp_path):
    # fitted scheme on a genuinely graded mesh is rejected as usage
    code = main(["solve", "--problem", "p1", "--scheme", "ilin",
                 "--mesh", "bakhvalov", "--N", "16", "--eps", "1e-6",
                 "--out", str(tmp_path / "x.txt")])
    assert code == 1


def test_missing_config_exit_code():
    assert main(["convergence", "--config", "/does/not/exist.json"]) == 1


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    import convdiff.cli as cli_mod

    def boom(*args, **kwargs):
        raise NumericalError("synthetic blow-up")

    monkeypatch.setattr(cli_mod.fd1d, "solve_1d", boom)
    code = main(["solve", "--problem", "p1", "--scheme", "upwind",
                 "--mesh", "uniform", "--N", "8", "--eps", "0.1",
                 "--out", str(tmp_path / "x.txt")])
    assert code == 2


def test_compare_requires_two_schemes(tmp_path):
    cfg = {"problem": "p1", "schemes": ["upwind"], "mesh": "uniform",
           "N": [8], "eps": [0.1]}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["compare", "--config", str(cfg_path)]) == 1
