"""Command-line surface: exit codes, output formats, and schema round-trips."""

import json

from p4groups.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_type(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


ROW1 = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[1, 3], [0, 1]], "v": [0, 0]}
SCALING_E2 = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[4, 0], [0, 1]], "v": [0, 1]}
SHEAR_E2 = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[1, 0], [1, 1]], "v": [0, 1]}
SCALING_V0 = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[4, 0], [0, 1]], "v": [0, 0]}
SHEAR_V0 = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[1, 0], [1, 1]], "v": [0, 0]}
BAD_V = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[1, 3], [0, 1]], "v": [0, 1]}
IDENTITY_TAU = {"p": 3, "shape": "p2xp", "n": 3, "tau": [[1, 0], [0, 1]], "v": [0, 0]}


class TestClassifyCommand:
    def test_p3_table(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "3")
        assert code == 0
        assert "total: 15 classes (5 abelian, 10 nonabelian)" in out

    def test_composite_p_is_usage_error(self, capsys):
        code, _, err = run(capsys, "classify", "--p", "4")
        assert code == 2
        assert "prime" in err

    def test_even_prime_rejected(self, capsys):
        code, _, err = run(capsys, "classify", "--p", "2")
        assert code == 2
        assert "odd" in err

    def test_guard_requires_force(self, capsys):
        code, _, err = run(capsys, "classify", "--p", "11")
        assert code == 2
        assert "--force" in err

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "3", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert data["counts"] == {"abelian": 5, "nonabelian": 10, "total": 15}
        nonabelian = [c for c in data["classes"] if c["tau"] is not None]
        assert len(nonabelian) == 10
        assert all("fingerprint" in c and "merged_labels" in c for c in data["classes"])

    def test_csv_output(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "3", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("label,group_order,center_invariants")
        assert len(lines) == 16


class TestConstructCommand:
    def test_census(self, capsys, tmp_path):
        path = write_type(tmp_path, "row1.json", ROW1)
        code, out, _ = run(capsys, "construct", "--type", path, "--emit", "census")
        assert code == 0
        census = json.loads(out)
        assert census == {"1": 1, "3": 26, "9": 54}

    def test_fingerprint_of_direct_product(self, capsys, tmp_path):
        path = write_type(tmp_path, "abelian.json", IDENTITY_TAU)
        code, out, _ = run(capsys, "construct", "--type", path)
        assert code == 0
        fp = json.loads(out)
        assert fp["derived_order"] == 1
        assert fp["group_order"] == 81

    def test_cayley_csv(self, capsys, tmp_path):
        path = write_type(tmp_path, "row1.json", ROW1)
        code, out, _ = run(capsys, "construct", "--type", path, "--emit", "cayley")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "81"
        assert len(lines) == 82
        first_row = [int(x) for x in lines[1].split(",")]
        assert first_row == list(range(81))

    def test_invalid_type_diagnostic(self, capsys, tmp_path):
        path = write_type(tmp_path, "bad.json", BAD_V)
        code, _, err = run(capsys, "construct", "--type", path)
        assert code == 1
        assert "v-not-fixed" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "construct", "--type", str(tmp_path / "absent.json"))
        assert code == 1
        assert err

    def test_output_file(self, capsys, tmp_path):
        path = write_type(tmp_path, "row1.json", ROW1)
        out_path = tmp_path / "census.json"
        code, _, _ = run(capsys, "construct", "--type", path, "--emit", "census",
                         "--out", str(out_path))
        assert code == 0
        assert json.loads(out_path.read_text()) == {"1": 1, "3": 26, "9": 54}


class TestIsoCommand:
    def test_isomorphic_pair(self, capsys, tmp_path):
        a = write_type(tmp_path, "a.json", SCALING_E2)
        b = write_type(tmp_path, "b.json", SHEAR_E2)
        code, out, _ = run(capsys, "iso", a, b)
        assert code == 0
        data = json.loads(out)
        assert data["isomorphic"] is True
        assert sorted(data["witness"]) == list(range(81))

    def test_nonisomorphic_pair(self, capsys, tmp_path):
        a = write_type(tmp_path, "a.json", SCALING_V0)
        b = write_type(tmp_path, "b.json", SHEAR_V0)
        code, out, _ = run(capsys, "iso", a, b)
        assert code == 3
        assert json.loads(out)["isomorphic"] is False

    def test_self_comparison(self, capsys, tmp_path):
        a = write_type(tmp_path, "a.json", ROW1)
        b = write_type(tmp_path, "b.json", ROW1)
        code, out, _ = run(capsys, "iso", a, b)
        assert code == 0
        assert json.loads(out)["witness"] == list(range(81))

    def test_parse_failure(self, capsys, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("{not json")
        a = write_type(tmp_path, "a.json", ROW1)
        code, _, err = run(capsys, "iso", str(bad), a)
        assert code == 1
        assert err


class TestTablesCommand:
    def test_p3(self, capsys):
        code, out, _ = run(capsys, "tables", "--p", "3")
        assert code == 0
        assert "[[1,6],[1,1]]" in out  # epsilon = 2 substituted
        assert "63" in out and "45" in out

    def test_usage_error(self, capsys):
        code, _, _ = run(capsys, "tables", "--p", "6")
        assert code == 2


class TestVerifyCommand:
    def test_p3_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--p", "3", "--seed", "0")
        assert code == 0
        assert "[ok] group-axioms" in out
        assert "[ok] power-norm-law" in out
        assert "[ok] transform-equivalence" in out
        assert "FAIL" not in out

    def test_usage_error(self, capsys):
        code, _, _ = run(capsys, "verify", "--p", "9")
        assert code == 2
