import json

import numpy as np
import pytest
from conftest import crandn
from hypothesis import given, settings
from hypothesis import strategies as st

from pencilrank import cli, io
from pencilrank.exceptions import FormatError


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, example, w_tensor):
    paths = {}
    for name, T in [("example", example), ("w", w_tensor)]:
        paths[name] = tmp_path / f"{name}.json"
        io.write_tensor(T, paths[name])
    for name, M in [("e2", np.eye(2))]:
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(io.dumps(io.matrix_to_doc(M)))
    return paths


finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=8, max_size=8))
def test_round_trip(values):
    A = np.array([complex(a, b) for a, b in values]).reshape(2, 2, 2)
    B = io.loads_tensor(io.dumps_tensor(A))
    assert np.array_equal(A.view(float), B.view(float))
    assert np.array_equal(np.signbit(A.real), np.signbit(B.real))
    assert np.array_equal(np.signbit(A.imag), np.signbit(B.imag))


def test_negative_zero_and_tiny():
    A = np.array([complex(-0.0, 5e-324), complex(1e-310, -0.0)]).reshape(1, 1, 2)
    B = io.loads_tensor(io.dumps_tensor(A))
    assert np.signbit(B[0, 0, 0].real) and B[0, 0, 0].imag == 5e-324
    assert B[0, 0, 1].real == 1e-310 and np.signbit(B[0, 0, 1].imag)


def test_document_layout(example):
    doc = json.loads(io.dumps_tensor(example))
    assert doc["dims"] == [2, 2, 2]
    assert doc["slices"][1] == [[[0.0, 0.0], [-1.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]]


@pytest.mark.parametrize(
    "text",
    [
        '{"dims": [1, 1, 1], "slices": [[[[NaN, 0]]]]}',
        '{"dims": [1, 1, 1], "slices": [[[[Infinity, 0]]]]}',
        '{"dims": [1, 1, 2], "slices": [[[[1, 0]]]]}',
        '{"dims": [1, 1], "slices": []}',
        '{"dims": [1, 1, 1], "slices": [[[[1, 0, 0]]]]}',
        '{"dims": [1, 1, 1], "slices": [[[["1", 0]]]]}',
        '{"dims": [1, 1, 1]}',
        "not json",
    ],
)
def test_rejects(text):
    with pytest.raises(FormatError):
        io.loads_tensor(text)


def test_matrix_doc():
    M = np.array([[1, 2j], [3, 4]])
    assert np.array_equal(io.loads_matrix(io.dumps(io.matrix_to_doc(M))), M)
    with pytest.raises(FormatError):
        io.loads_matrix('{"shape": [2, 2], "entries": [[[1, 0]]]}')


class TestCLI:
    def test_rank_example(self, capsys, files):
        code, out, _ = run(capsys, "rank", files["example"])
        doc = json.loads(out)
        assert code == 0
        assert doc["verdict"] == "RankEqualsM" and doc["m"] == 2
        assert doc["seed"] == 0 and "gap_tol" in doc["tolerances"]

    def test_rank_w(self, capsys, files):
        code, out, _ = run(capsys, "rank", files["w"], "--seed", 4)
        assert code == 0
        assert json.loads(out)["verdict"] == "RankNotEqualM_Exceeds"

    def test_rank_no_invertible_combination(self, capsys, tmp_path):
        e1 = np.array([1.0, 0.0])
        path = tmp_path / "deg.json"
        io.write_tensor(np.stack([np.outer(e1, e1), np.outer(e1, [0, 1])], axis=2), path)
        code, out, _ = run(capsys, "rank", path)
        assert code == cli.EXIT_INCONCLUSIVE
        assert json.loads(out)["verdict"] == "Inconclusive"

    def test_act_identity_byte_identical(self, capsys, files):
        code, out, _ = run(capsys, "act", files["example"], "--l", files["e2"], "--m", files["e2"], "--n", files["e2"])
        assert code == 0
        assert out == files["example"].read_text()

    def test_act_dimension_error(self, capsys, files, tmp_path):
        e3 = tmp_path / "e3.json"
        e3.write_text(io.dumps(io.matrix_to_doc(np.eye(3))))
        code, _, err = run(capsys, "act", files["example"], "--l", e3, "--m", files["e2"], "--n", files["e2"])
        assert code == cli.EXIT_DIMENSION and "dimension" in err

    def test_act_singular(self, capsys, files, tmp_path):
        z = tmp_path / "z.json"
        z.write_text(io.dumps(io.matrix_to_doc(np.zeros((2, 2)))))
        code, _, _ = run(capsys, "act", files["example"], "--l", z, "--m", files["e2"], "--n", files["e2"])
        assert code == cli.EXIT_SINGULAR

    def test_leap(self, capsys):
        code, out, _ = run(capsys, "leap", "--n", 1, "--k", "10")
        doc = json.loads(out)
        assert code == 0
        assert doc["members"][0]["l1_deviation"] == 0.1
        assert doc["members"][0]["certificate"]["verdict"] == "RankEqualsM"
        assert doc["limit_certificate"]["verdict"] == "RankNotEqualM_Exceeds"
        assert doc["claimed_rank_A"] == 3

    def test_approx(self, capsys, files, tmp_path):
        out_tensor = tmp_path / "b.json"
        code, out, _ = run(capsys, "approx", files["w"], "--eps", "1e-6", "--tensor-out", out_tensor)
        doc = json.loads(out)
        assert code == 0 and doc["deviation_l1"] < 1e-6
        assert doc["certificate"]["verdict"] == "RankEqualsM"
        B = io.read_tensor(out_tensor)
        assert np.array_equal(B, io.tensor_from_doc(doc["tensor"]))

    def test_approx_failure_code(self, capsys, files):
        code, _, err = run(capsys, "approx", files["w"], "--eps", "1e-3", "--max-attempts", "0")
        assert code == cli.EXIT_PERTURBATION and "perturbation" in err

    def test_oracle(self, capsys, files):
        code, out, _ = run(capsys, "oracle", files["w"], "--r", 3, "--restarts", 3)
        doc = json.loads(out)
        assert code == 0 and doc["decision"] == "AtMostR" and doc["best_residual"] < 1e-8

    def test_gen(self, capsys, example):
        code, out, _ = run(capsys, "gen", "example")
        assert code == 0 and np.array_equal(io.loads_tensor(out), example)
        code, out, _ = run(capsys, "gen", "random", "--seed", 3, "--dims", "2,3,2")
        assert io.loads_tensor(out).shape == (2, 3, 2)

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dims": [1, 1, 1], "slices": [[[[NaN, 0]]]]}')
        code, _, err = run(capsys, "rank", bad)
        assert code == cli.EXIT_PARSE and "bad.json" in err
        code, _, err = run(capsys, "rank", tmp_path / "missing.json")
        assert code == cli.EXIT_PARSE

    def test_output_file(self, capsys, files, tmp_path):
        target = tmp_path / "cert.json"
        code, out, _ = run(capsys, "rank", files["example"], "-o", target)
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["verdict"] == "RankEqualsM"

    def test_determinism(self, capsys, files):
        for argv in (["rank", files["example"], "--seed", 11], ["approx", files["w"], "--eps", "1e-4"]):
            outputs = {run(capsys, *argv)[1] for _ in range(3)}
            assert len(outputs) == 1
