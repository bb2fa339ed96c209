import json
import random

import numpy as np
import pytest

from hadforge import catalog
from hadforge.cli import main
from hadforge.matrices import (
    ExponentMatrix,
    apply_equivalence,
    dump_matrix,
    matrix_from_json,
    move_from_json,
    random_move,
    to_complex,
)
from hadforge.mub import fourier

S9_JSON = '{"p":3,"q":3,"K":["I","I","H1"],"L":["F","F","H2"]}'


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def jrun(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def f4(tmp_path):
    path = tmp_path / "f4.json"
    dump_matrix(fourier(4), str(path))
    return str(path)


@pytest.fixture
def f4_float(tmp_path):
    path = tmp_path / "f4c.json"
    dump_matrix(to_complex(fourier(4)), str(path))
    return str(path)


class TestGen:
    def test_inline_assignment(self, capsys):
        code, out = jrun(capsys, "gen", S9_JSON, "--dephase")
        assert code == 0
        H = matrix_from_json(out)
        assert H.d == 9 and all(e == 0 for e in H.exp[0])

    def test_assignment_from_file(self, capsys, tmp_path):
        spec = tmp_path / "a.json"
        spec.write_text(S9_JSON)
        code, out = jrun(capsys, "gen", str(spec))
        assert code == 0 and matrix_from_json(out).d == 9

    def test_bad_assignment_is_usage_error(self, capsys):
        code, _, err = run(capsys, "gen", '{"p":3}')
        assert code == 2 and "hadforge:" in err

    def test_float_mode(self, capsys):
        code, out = jrun(capsys, "gen", S9_JSON, "--mode", "float")
        assert code == 0 and "re" in out and "im" in out


class TestDephase:
    def test_writes_matrix_and_move(self, capsys, tmp_path):
        scrambled = apply_equivalence(fourier(4), random_move(4, 8, random.Random(1)))
        src = tmp_path / "in.json"
        dump_matrix(scrambled, str(src))
        mv = tmp_path / "mv.json"
        code, out = jrun(capsys, "dephase", str(src), "--move", str(mv))
        assert code == 0
        Hd = matrix_from_json(out)
        assert all(e == 0 for e in Hd.exp[0])
        assert all(row[0] == 0 for row in Hd.exp)
        move = move_from_json(json.loads(mv.read_text()))
        assert apply_equivalence(scrambled, move) == Hd


class TestUnitary:
    def test_exact_pass(self, capsys, f4):
        code, out = jrun(capsys, "unitary", f4)
        assert code == 0
        assert out == {"unitary": True, "mode": "exact", "d": 4}

    def test_failure_exit_code(self, capsys, tmp_path):
        flat = ExponentMatrix(2, 2, ((0, 0), (0, 0)))
        path = tmp_path / "flat.json"
        dump_matrix(flat, str(path))
        code, out = jrun(capsys, "unitary", str(path))
        assert code == 1 and out["unitary"] is False


class TestButson:
    def test_min_root(self, capsys, f4):
        code, out = jrun(capsys, "butson", f4)
        assert code == 0 and out["min_root"] == 4

    def test_divisibility(self, capsys, f4):
        code, out = jrun(capsys, "butson", f4, "--root", "8")
        assert code == 0 and out["is_butson"] is True
        code, out = jrun(capsys, "butson", f4, "--root", "3")
        assert code == 1 and out["is_butson"] is False

    def test_float_needs_root(self, capsys, f4_float):
        code, _, err = run(capsys, "butson", f4_float)
        assert code == 2 and "root" in err

    def test_float_with_root(self, capsys, f4_float):
        code, out = jrun(capsys, "butson", f4_float, "--root", "4")
        assert code == 0 and out["is_butson"] is True

    def test_exact_flag_refuses_float(self, capsys, f4_float):
        code, _, err = run(capsys, "butson", f4_float, "--exact")
        assert code == 2


class TestHaagerup:
    def test_exact_members(self, capsys, tmp_path):
        path = tmp_path / "f3.json"
        dump_matrix(fourier(3), str(path))
        code, out = jrun(capsys, "haagerup", str(path))
        assert code == 0
        assert out["members"] == [[0, 1], [1, 3], [2, 3]]
        assert len(out["fingerprint"]) == 64

    def test_float_angles(self, capsys, f4_float):
        code, out = jrun(capsys, "haagerup", f4_float)
        assert code == 0 and len(out["angles"]) == out["size"] == 4
        assert "fingerprint" not in out


class TestDefect:
    def test_exact(self, capsys, f4):
        code, out = jrun(capsys, "defect", f4)
        assert code == 0
        assert out["defect"] == 1 and out["mode"] == "exact"
        assert out["isolated"] is False and out["variables"] == 9

    def test_float(self, capsys, f4_float):
        code, out = jrun(capsys, "defect", f4_float)
        assert code == 0 and out["defect"] == 1 and out["mode"] == "float"

    def test_exact_mode_on_float_input(self, capsys, f4_float):
        code, _, err = run(capsys, "defect", f4_float, "--mode", "exact")
        assert code == 2

    def test_indeterminate_exit(self, capsys, f4_float, monkeypatch):
        def murky_svd(M, compute_uv=True):
            n = min(M.shape)
            return np.array([1.0] + [0.5] * (n - 2) + [1e-12])

        monkeypatch.setattr(np.linalg, "svd", murky_svd)
        code, out = jrun(capsys, "defect", f4_float)
        assert code == 3 and out["indeterminate"] is True


class TestMub:
    def test_basic(self, capsys):
        code, out = jrun(capsys, "mub", "3")
        assert code == 0
        assert len(out["bases"]) == 4

    def test_triangular_diagonal(self, capsys):
        code, out = jrun(capsys, "mub", "7", "--diagonal", "triangular")
        assert code == 0

    def test_composite_rejected(self, capsys):
        code, _, err = run(capsys, "mub", "6")
        assert code == 2 and "hadforge:" in err


class TestCatalog:
    def test_list(self, capsys):
        code, out = jrun(capsys, "catalog", "list")
        assert code == 0 and len(out) == 14
        assert out[0]["name"] == "S6" and out[-1]["name"] == "S91"

    def test_show_with_matrix(self, capsys):
        code, out = jrun(capsys, "catalog", "show", "S9", "--matrix")
        assert code == 0 and out["expected_root"] == 6
        assert matrix_from_json(out["matrix"]).d == 9

    def test_show_unknown(self, capsys):
        code, _, err = run(capsys, "catalog", "show", "S8")
        assert code == 2

    def test_verify_subset(self, capsys, tmp_path):
        report = tmp_path / "rep.json"
        code, out, _ = run(
            capsys, "catalog", "verify", "S9", "S10", "--json", str(report)
        )
        assert code == 0 and "all checks passed" in out
        assert json.loads(report.read_text())["all_pass"] is True


def test_search_smallest(capsys):
    code, out = jrun(capsys, "search", "2", "2")
    assert code == 0
    assert out["examined"] == 3 and out["isolated"] == []
    assert out["partial"] is False


def test_compare(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    dump_matrix(catalog.load("S9"), str(a))
    dump_matrix(fourier(9), str(b))
    code, out = jrun(capsys, "compare", str(a), str(b))
    assert code == 0
    assert out["verdict"] == "inequivalent" and out["reasons"]
    assert out["defect"] == [0, 4]


def test_output_flag_writes_file(capsys, f4, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "unitary", f4, "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["unitary"] is True


def test_output_is_deterministic(capsys):
    _, first, _ = run(capsys, "catalog", "list")
    _, second, _ = run(capsys, "catalog", "list")
    assert first == second
    _, g1, _ = run(capsys, "gen", S9_JSON)
    _, g2, _ = run(capsys, "gen", S9_JSON)
    assert g1 == g2
