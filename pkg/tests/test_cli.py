import io
import json
import math

import pandas as pd
import pytest

from sdlab import __version__
from sdlab.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, run
from sdlab.errors import VerificationError
from sdlab.services.formatter import BOUND_COLUMNS


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_bounds_table(capsys):
    assert run(["bounds", "--n-max", "3", "--r", "1"]) == EXIT_OK
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(frame.columns) == BOUND_COLUMNS
    assert frame["n"].tolist() == [1, 2, 3]
    assert frame["theorem1_bound"][0] == pytest.approx(2.0943951, abs=1e-7)
    assert frame["theorem1_bound"][1] == pytest.approx(1.8403024, abs=1e-7)
    assert frame["theorem2_bound"][2] == pytest.approx(math.sqrt(7 / 12), abs=1e-11)


def test_bounds_output_file_matches_stdout(capsys, tmp_path):
    out = tmp_path / "reports" / "table.csv"
    assert run(["bounds", "--n-max", "4", "--out", str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8") == capsys.readouterr().out


def test_construct(capsys):
    assert run(["construct", "--n", "4"]) == EXIT_OK
    report = _json(capsys)
    assert report["version"] == __version__
    assert report["dims"] == [2, 2]
    assert report["min_vertex_distance"] == pytest.approx(math.sqrt(2 / 3), abs=1e-9)
    assert report["theorem2_bound"]["value"] == pytest.approx(math.sqrt(2 / 3), abs=1e-12)
    assert report["witness"]["point"] == pytest.approx([0.0] * 4, abs=1e-9)


def test_certify_constant_values(capsys, write_json):
    path = write_json("values.json", [1.0, 1.0, 1.0])
    assert run(["certify-1d", "--values", str(path)]) == EXIT_OK
    report = _json(capsys)
    assert report["value"] == pytest.approx(2 * math.pi / 3)
    assert report["certificate"]["case"] == "tie"
    assert report["sampled_distortion"] >= report["value"] - 1e-12


def test_certify_even_grid_is_a_usage_error(capsys, write_json):
    path = write_json("values.json", [0.0, 1.0, 2.0, 3.0])
    assert run(["certify-1d", "--values", str(path)]) == EXIT_USAGE
    assert "odd" in capsys.readouterr().err


def test_unreadable_json_is_a_usage_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("[1, 2", encoding="utf-8")
    assert run(["certify-1d", "--values", str(path)]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["bounds", "--n-max", "0"],
        ["search", "minimax", "--N", "20"],
        ["search", "minimax", "--n", "1", "--m", "2"],
        ["search", "granas", "--map", "example", "--n", "2"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_version(capsys):
    assert run(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_verify_is_deterministic(capsys):
    argv = ["verify", "--scale", "quick", "--suite", "bound_table", "--suite", "caratheodory", "--seed", "5"]
    assert run(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert run(argv) == EXIT_OK
    assert capsys.readouterr().out == first
    report = json.loads(first)
    assert report["passed"] is True
    assert report["seed"] == 5
    assert [suite["name"] for suite in report["suites"]] == ["bound_table", "caratheodory"]
    assert all(suite["violations"] == 0 for suite in report["suites"])


def test_verify_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SDLAB_SEED", "7")
    assert run(["verify", "--scale", "quick", "--suite", "sharp_pair"]) == EXIT_OK
    assert _json(capsys)["seed"] == 7


def test_verification_failure_exit_code(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise VerificationError("[jung] radius above bound", {"suite": "jung", "points": [[0.0]]})

    monkeypatch.setattr("sdlab.handlers.verify.run_suites", broken)
    assert run(["verify", "--scale", "quick"]) == EXIT_VERIFICATION
    report = _json(capsys)
    assert report["passed"] is False
    assert report["instance"] == {"suite": "jung", "points": [[0.0]]}
    assert "radius above bound" in report["error"]


def test_circumsphere(capsys, write_json):
    path = write_json("points.json", [[0, 0], [4, 0], [0, 3]])
    assert run(["circumsphere", "--points", str(path)]) == EXIT_OK
    report = _json(capsys)
    assert report["diameter"] == pytest.approx(5.0)
    assert report["affine_dimension"] == 2
    assert report["equidistant"]["center"] == pytest.approx([2.0, 1.5])
    assert report["min_enclosing"]["radius"] == pytest.approx(2.5)
    assert report["jung_bound"] == pytest.approx(5.0 / math.sqrt(3))


def test_circumsphere_degenerate_points(capsys, write_json):
    path = write_json("points.json", [[0, 0], [1, 1], [2, 2]])
    assert run(["circumsphere", "--points", str(path)]) == EXIT_OK
    report = _json(capsys)
    assert report["equidistant"] is None
    assert report["min_enclosing"]["radius"] == pytest.approx(math.sqrt(2))
    assert run(["circumsphere", "--points", str(path), "--flavor", "equidistant"]) == EXIT_USAGE


def test_intersect_with_reduction(capsys, write_json):
    path = write_json(
        "pair.json",
        {"a": [[0, 0], [2, 0], [0, 2]], "b": [[0.5, 0.5], [2.5, 0.5], [0.5, 2.5]]},
    )
    assert run(["intersect", "--points", str(path), "--reduce"]) == EXIT_OK
    report = _json(capsys)
    assert report["intersects"] is True
    assert sum(report["reduced"]["dims"]) <= 2
    assert report["min_vertex_distance"]["distance"] == pytest.approx(math.sqrt(0.5))


def test_intersect_disjoint(capsys, write_json):
    path = write_json("pair.json", {"a": [[0.0], [1.0]], "b": [[2.0], [3.0]]})
    assert run(["intersect", "--points", str(path)]) == EXIT_OK
    report = _json(capsys)
    assert report["intersects"] is False
    assert report["witness"] is None
    assert report["min_vertex_distance"] == {"i": 1, "j": 0, "distance": 1.0}


def test_intersect_reduce_needs_simplices(write_json):
    path = write_json("pair.json", {"a": [[0, 0], [1, 1], [2, 2]], "b": [[1, 1]]})
    assert run(["intersect", "--points", str(path), "--reduce"]) == EXIT_USAGE


def test_distortion_of_relation_file(capsys, write_json):
    path = write_json(
        "relation.json",
        {"r": 1.0, "pairs": [{"x": [0.0, 1.0], "y": [0.0]}, {"x": [0.0, -1.0], "y": [0.0]}]},
    )
    assert run(["distortion", "--relation", str(path)]) == EXIT_OK
    report = _json(capsys)
    assert report["pairs"] == 2
    assert report["distortion"] == pytest.approx(math.pi)
    assert report["witness"] == [0, 1]


def test_search_granas_constant_map(capsys):
    assert run(["search", "granas", "--map", "constant", "--n", "2", "--N", "50"]) == EXIT_OK
    report = _json(capsys)
    assert report["kind"] == "granas"
    assert report["found"] is True
    assert report["trials"] == 1


def test_search_adversarial(capsys):
    argv = ["search", "adversarial", "--n", "2", "--trials", "2", "--climb-steps", "10", "--seed", "3"]
    assert run(argv) == EXIT_OK
    report = _json(capsys)
    assert report["seed"] == 3
    assert report["configuration"]["ratio"] <= 1.0 + 1e-6


def test_search_minimax_small(capsys):
    argv = ["search", "minimax", "--N", "21", "--restarts", "2", "--iterations", "20"]
    assert run(argv) == EXIT_OK
    report = _json(capsys)
    assert report["parameters"]["N"] == 21
    assert report["best_value"] >= report["configuration"]["certified"]["value"] - 1e-12


def test_distortion_rejects_pair_without_image(capsys, write_json):
    path = write_json("relation.json", {"r": 1.0, "pairs": [{"x": [1.0, 0.0]}]})
    assert run(["distortion", "--relation", str(path)]) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_search_granas_reports_the_seed(capsys):
    argv = ["search", "granas", "--map", "projection", "--n", "2", "--N", "300", "--seed", "5"]
    assert run(argv) == EXIT_OK
    report = _json(capsys)
    assert report["seed"] == 5
    assert report["parameters"]["samples"] == 300
