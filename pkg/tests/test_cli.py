import json
import subprocess
import sys

import numpy as np
import pytest

from povmtree import tetrad, validate
from povmtree.cli import main
from povmtree.io import encode_matrix, load_povm, load_tree, save_povm


@pytest.fixture
def tetrad_file(tmp_path):
    path = tmp_path / "tetrad.povm.json"
    save_povm(tetrad(), path)
    return str(path)


@pytest.fixture
def triple_file(tmp_path):
    third = np.eye(2) / 3
    path = tmp_path / "triple.povm.json"
    save_povm(validate([third, third, third]), path)
    return str(path)


class TestValidateCommand:
    def test_valid_povm(self, tetrad_file, capsys):
        assert main(["validate", tetrad_file]) == 0
        out = capsys.readouterr().out
        assert "valid" in out and "completeness residual" in out

    def test_incomplete_sum(self, tmp_path, capsys):
        path = tmp_path / "bad.povm.json"
        path.write_text(
            json.dumps(
                {
                    "dimension": 2,
                    "elements": [encode_matrix(np.eye(2)), encode_matrix(np.eye(2))],
                }
            )
        )
        assert main(["validate", str(path)]) == 1
        assert "sum" in capsys.readouterr().err

    def test_truncated_file(self, tmp_path, capsys):
        path = tmp_path / "trunc.json"
        path.write_text('{"dimension": 2')
        assert main(["validate", str(path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 2


class TestCompileCommand:
    def test_tetrad_with_grouping(self, tetrad_file, tmp_path, capsys):
        out_path = str(tmp_path / "tetrad.tree.json")
        code = main(["compile", tetrad_file, "--grouping", "0,3|1,2", "--out", out_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "operation counts" in out
        tree = load_tree(out_path)
        assert tree.root.outcome_set == (0, 3, 1, 2)

    def test_padding_warning(self, triple_file, tmp_path, capsys):
        out_path = str(tmp_path / "triple.tree.json")
        assert main(["compile", triple_file, "--out", out_path]) == 0
        assert "pad3" in capsys.readouterr().out
        assert load_tree(out_path).povm.n_outcomes == 4

    def test_invalid_grouping(self, tetrad_file, tmp_path):
        out_path = str(tmp_path / "x.tree.json")
        assert main(["compile", tetrad_file, "--grouping", "0,3|1", "--out", out_path]) == 2
        assert main(["compile", tetrad_file, "--grouping", "0,3|1,a", "--out", out_path]) == 2

    def test_default_output_name(self, tetrad_file, tmp_path, capsys):
        assert main(["compile", tetrad_file]) == 0
        expected = tetrad_file.replace(".json", "") + ".tree.json"
        assert expected in capsys.readouterr().out


class TestSimulateCommand:
    @pytest.fixture
    def tetrad_tree(self, tetrad_file, tmp_path):
        out_path = str(tmp_path / "tetrad.tree.json")
        assert main(["compile", tetrad_file, "--grouping", "0,3|1,2", "--out", out_path]) == 0
        return out_path

    def test_pure_state(self, tetrad_tree, capsys):
        assert main(["simulate", tetrad_tree, "--state", "pure:0"]) == 0
        out = capsys.readouterr().out
        assert "0.5000000000" in out and "0.1666666667" in out

    def test_maximally_mixed(self, tetrad_tree, capsys):
        assert main(["simulate", tetrad_tree]) == 0
        assert "0.2500000000" in capsys.readouterr().out

    def test_sampling_deterministic(self, tetrad_tree, capsys):
        args = ["simulate", tetrad_tree, "--shots", "20000", "--seed", "42"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first
        assert "sigma" in first

    def test_tampered_tree_fails(self, tetrad_tree, tmp_path, capsys):
        data = json.loads(open(tetrad_tree).read())
        for record in data["nodes"]:
            if record["path"] == "10":
                record["node_kraus"][0][0][0] += 1e-3
                record["cumulative_kraus"][0][0][0] += 1e-3
        bad = tmp_path / "tampered.tree.json"
        bad.write_text(json.dumps(data))
        assert main(["simulate", str(bad), "--state", "pure:0"]) == 3


class TestCostCommand:
    def test_table(self, capsys):
        assert main(["cost", "1024", "2"]) == 0
        out = capsys.readouterr().out
        assert "523776" in out and "3066" in out and "60" in out

    def test_average_and_crossover(self, capsys):
        assert main(["cost", "16", "2", "--average", "--crossover"]) == 0
        out = capsys.readouterr().out
        assert "average 21" in out and "cheapest from N" in out

    def test_invalid(self, capsys):
        assert main(["cost", "2", "3"]) == 2


class TestExampleTetrad:
    def test_emits_files_and_values(self, tmp_path, capsys):
        out_dir = tmp_path / "demo"
        assert main(["example-tetrad", "--out", str(out_dir)]) == 0
        povm = load_povm(out_dir / "tetrad.povm.json")
        m03 = povm.elements[0] + povm.elements[3]
        assert m03[0, 1] == pytest.approx(1 / (3 * np.sqrt(2)), abs=1e-12)
        tree = load_tree(out_dir / "tetrad.tree.json")
        b1 = tree.leaf_for_outcome(1).node_kraus
        expected = 0.5 * np.array([[1.0, -1.0j], [1.0j, 1.0]])
        assert np.linalg.norm(b1.conj().T @ b1 - expected) <= 1e-9
        b0 = tree.leaf_for_outcome(0).node_kraus
        b3 = tree.leaf_for_outcome(3).node_kraus
        closure = b0.conj().T @ b0 + b3.conj().T @ b3 - np.eye(2)
        assert np.linalg.norm(closure) <= 1e-12
        text = (out_dir / "walkthrough.txt").read_text()
        assert "B1" in text and "eigenvalues" in text


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "povmtree", "cost", "16", "2"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "42" in proc.stdout
