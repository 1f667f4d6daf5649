import json
import math

import pytest

from conftest import problem_path
from qde_config import DEFAULT_TOLERANCES
from qde_errors import ProblemFileError
from qde_linalg import QMatrix, QVector
from qde_problem import (
    load_problem,
    load_vector,
    problem_from_dict,
    render,
    save_problem,
    to_jsonable,
    to_text,
)
from qde_quat import I, J, Quaternion


def test_load_problem_takes_name_from_file():
    p = load_problem(problem_path("ex52"))
    assert p.name == "ex52"
    assert p.matrix[0, 0] == I
    assert len(p.x0) == 2
    assert p.t == 1.0 and p.t0 == 0.0
    assert p.tolerance == DEFAULT_TOLERANCES


def test_name_key_wins_over_stem(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"name": "named", "matrix": [[1]]}), encoding="utf-8")
    assert load_problem(str(path)).name == "named"


def test_coefficients_and_arrays():
    p = problem_from_dict({"coeffs": [["j", "j"], [0, 0, 1, 0], "1+i"], "x0": [1, 1, 1]})
    assert [c.degree for c in p.coeffs] == [1, 0, 0]
    assert p.coeffs[1](3.0) == J
    assert p.matrix is None


def test_tolerance_overrides():
    p = problem_from_dict({"matrix": [[1]], "tolerance": {"residual": 1e-6}})
    assert p.tolerance.residual == 1e-6
    assert p.tolerance.fd == DEFAULT_TOLERANCES.fd


@pytest.mark.parametrize(
    "raw, message",
    [
        ([1, 2], "JSON object"),
        ({"matrix": [[1]], "colour": 1}, "unknown keys"),
        ({"matrix": {"rows": []}}, "matrix must be"),
        ({"matrix": [[1, 2], [3]]}, "bad matrix"),
        ({"matrix": [[1, 0], [0, 1]], "x0": [1]}, "x0 has length 1"),
        ({"matrix": [[1]], "x0": [1], "expected": [1, 2]}, "expected has length 2"),
        ({"matrix": [[1]], "expected": [1]}, "expected needs x0"),
        ({"matrix": [[1]], "coeffs": [["i"], ["j"]]}, "disagree"),
        ({"matrix": [[1]], "t": "soon"}, "t must be a finite number"),
        ({"matrix": [[1]], "t": math.inf}, "t must be a finite number"),
        ({"matrix": [[1]], "tolerance": {"fuzz": 1}}, "unknown tolerance keys"),
        ({"coeffs": []}, "coeffs must be"),
        ({"x0": []}, "vector must be"),
    ],
)
def test_rejections(raw, message):
    with pytest.raises(ProblemFileError, match=message):
        problem_from_dict(raw)


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"matrix": ', encoding="utf-8")
    with pytest.raises(ProblemFileError, match="invalid JSON"):
        load_problem(str(path))


def test_save_and_reload(tmp_path):
    p = problem_from_dict(
        {
            "name": "trip",
            "matrix": [["1-0.5j+2k", "i"], [0, 1]],
            "x0": ["j", 1],
            "t0": 0.5,
            "t": 2.0,
            "expected": [1, 2],
            "tolerance": {"fd": 1e-7},
        }
    )
    path = tmp_path / "trip.json"
    save_problem(p, str(path))
    q = load_problem(str(path))
    assert q.matrix.almost_equal(p.matrix)
    assert q.x0.almost_equal(p.x0) and q.expected.almost_equal(p.expected)
    assert (q.t0, q.t, q.name) == (0.5, 2.0, "trip")
    assert q.tolerance.fd == 1e-7
    assert "tolerance" in json.loads(path.read_text(encoding="utf-8"))


@pytest.mark.parametrize("content", [["1", "j"], {"entries": ["1", "j"]}, {"x0": ["1", "j"]}])
def test_load_vector_forms(tmp_path, content):
    path = tmp_path / "x0.json"
    path.write_text(json.dumps(content), encoding="utf-8")
    assert load_vector(str(path)).almost_equal(QVector.from_entries([1, "j"]))


def test_text_rendering():
    m = QMatrix.from_rows([["i", 1], [0, "1+k"]])
    assert to_text(m).splitlines() == ["  i    1", "  0  1+k"]
    assert to_text(QVector.from_entries([1, "-j"])) == "(1, -j)"
    assert to_text(Quaternion(1 / 3), digits=3) == "0.333"
    assert to_text(2.0) == "2"


def test_json_rendering():
    assert json.loads(render(Quaternion(1, 2, 3, 4), "json")) == [1.0, 2.0, 3.0, 4.0]
    assert json.loads(render(QVector.from_entries(["i"]), "json")) == {"entries": [[0.0, 1.0, 0.0, 0.0]]}
    assert to_jsonable({"factor": float("nan"), "m": [I]}) == {"factor": None, "m": [[0.0, 1.0, 0.0, 0.0]]}
