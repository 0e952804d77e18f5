import json

import pytest

from nvrcg.cli import main

A3_CONFIG = {
    "problem": {"family": "quad_linear", "A": [[1.0, 2.0], [2.0, 2.0]], "c": [1.0, 1.0]},
    "manifold": "sphere:2",
    "variants": ["DY", "SD"],
    "wolfe": {"c1": 0.1, "c2": 0.6, "strong": True},
    "runs": 10,
    "seed": 99,
}


@pytest.fixture
def config_path(tmp_path):
    out = tmp_path / "out"
    cfg = dict(A3_CONFIG, output_dir=str(out))
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path, out


class TestRun:
    def test_plain_summary(self, capsys):
        rc = main(
            [
                "run",
                "--problem",
                json.dumps(A3_CONFIG["problem"]),
                "--beta",
                "DY",
                "--seed",
                "5",
                "--strong",
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "termination:" in out
        assert "iterations:" in out

    def test_json_summary(self, capsys):
        rc = main(
            [
                "run",
                "--problem",
                json.dumps(A3_CONFIG["problem"]),
                "--beta",
                "SD",
                "--seed",
                "5",
                "--json",
            ]
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["termination"] in ("critical", "step_stagnated", "max_iter")
        assert "final_F" in payload

    def test_problem_from_file(self, tmp_path, capsys):
        p = tmp_path / "prob.json"
        p.write_text(json.dumps({"family": "quad_quad", "n": 4, "m": 2, "seed": 2}))
        rc = main(["run", "--problem", str(p), "--beta", "DY", "--seed", "1"])
        assert rc == 0


class TestBench:
    def test_writes_table_and_prints(self, config_path, capsys):
        path, out = config_path
        rc = main(["bench", "--config", str(path)])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "variant,mean_iterations" in stdout
        assert (out / "table.csv").exists()

    def test_repeat_identical(self, config_path, capsys):
        path, out = config_path
        main(["bench", "--config", str(path)])
        first = (out / "table.csv").read_bytes()
        main(["bench", "--config", str(path)])
        assert (out / "table.csv").read_bytes() == first

    def test_markdown_format(self, config_path, capsys):
        path, out = config_path
        rc = main(["bench", "--config", str(path), "--format", "markdown"])
        assert rc == 0
        assert (out / "table.md").exists()


class TestPareto:
    def test_writes_value_clouds(self, config_path, capsys):
        path, out = config_path
        rc = main(["pareto", "--config", str(path)])
        assert rc == 0
        assert (out / "values_DY.csv").exists()
        assert (out / "front_curve.csv").exists()

    def test_out_override(self, config_path, tmp_path, capsys):
        path, _ = config_path
        other = tmp_path / "elsewhere"
        rc = main(["pareto", "--config", str(path), "--out", str(other)])
        assert rc == 0
        assert (other / "values_DY.csv").exists()


class TestSelftest:
    def test_passes(self, capsys):
        rc = main(["selftest"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "[ok]" in out
        assert "[FAIL]" not in out
