"""
Tests for the command-line interface.
"""

import json
import pytest
import stat
import sys
from pathlib import Path

import jinja2
import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from sympball import cli
from sympball.cli import main, parse_args, run
from sympball.config import Config
from sympball.matrix_file import read_matrix_file, write_matrix_file, write_subspace_file
from sympball.symplectic import is_symplectic

C = np.array([[0.0, 1.0], [1.0, 0.0]])
SHEAR = np.block([[np.eye(2), np.zeros((2, 2))], [C, np.eye(2)]])


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in Config.ENV_MAPPINGS:
        monkeypatch.delenv(name, raising=False)


def invoke(argv):
    return run(parse_args(argv))


class TestArguments:
    """Tests for argument parsing."""

    def test_command_required(self):
        with pytest.raises(SystemExit):
            parse_args([])

    def test_verify_lists(self):
        args = parse_args(['verify', '--n', '2', '3', '--spread', '0.5', '--cases', '4'])
        assert args.n == [2, 3]
        assert args.spread == [0.5]
        assert args.cases == 4
        assert args.seed is None

    def test_global_format(self):
        args = parse_args(['--format', 'text', 'spectrum', '--input', 'm.json'])
        assert args.format == 'text'
        assert args.input == Path('m.json')

    def test_invalid_format(self):
        with pytest.raises(SystemExit):
            parse_args(['--format', 'xml', 'spectrum', '--input', 'm.json'])


class TestSpectrum:
    """Tests for the spectrum command."""

    def test_json(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", np.diag([4.0, 1.0]))
        assert invoke(['spectrum', '--input', str(path)]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["spectrum"] == pytest.approx([2.0])
        assert document["psd"] is True
        assert document["embedding_psd"] is True

    def test_text(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", np.diag([0.25, 1.0]))
        assert invoke(['--format', 'text', 'spectrum', '--input', str(path)]) == 0
        first_line = capsys.readouterr().out.splitlines()[0]
        assert first_line == "0.5; M+iJ PSD: no"

    def test_identity_text(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", np.eye(4))
        assert invoke(['--format', 'text', 'spectrum', '--input', str(path)]) == 0
        assert capsys.readouterr().out.startswith("1 1; M+iJ PSD: yes")

    def test_not_positive_definite(self, tmp_path):
        path = write_matrix_file(tmp_path / "m.json", np.diag([1.0, -1.0]))
        assert invoke(['spectrum', '--input', str(path)]) == 3

    def test_missing_file(self, tmp_path):
        assert invoke(['spectrum', '--input', str(tmp_path / "missing.json")]) == 2

    def test_not_symmetric(self, tmp_path):
        path = write_matrix_file(tmp_path / "m.json", np.array([[1.0, 5.0], [0.0, 1.0]]))
        assert invoke(['spectrum', '--input', str(path)]) == 3
        assert invoke(['williamson', '--input', str(path)]) == 3

    def test_output_file(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", np.eye(2))
        out = tmp_path / "out" / "result.json"
        assert invoke(['spectrum', '--input', str(path), '--out', str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["n"] == 1


class TestWilliamson:
    """Tests for the williamson command."""

    def test_json(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", np.diag([4.0, 1.0]))
        assert invoke(['williamson', '--input', str(path)]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["Lambda"] == pytest.approx([2.0])
        assert document["residuals"]["reconstruction"] < 1e-12

    def test_text(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", np.eye(2))
        assert invoke(['--format', 'text', 'williamson', '--input', str(path)]) == 0
        assert "Lambda: 1" in capsys.readouterr().out


class TestProject:
    """Tests for the project command."""

    def test_shear(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "s.json", SHEAR)
        assert invoke(['project', '--input', str(path), '--na', '1']) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["Lambda_A"][0] == pytest.approx(1 / np.sqrt(2), abs=1e-9)
        assert document["vol_projected"] == pytest.approx(np.pi * np.sqrt(2), abs=1e-9)
        assert document["exact"] is False
        assert document["subspace"] is False

    def test_text(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "s.json", SHEAR)
        assert invoke(['--format', 'text', 'project', '--input', str(path), '--na', '1']) == 0
        out = capsys.readouterr().out
        assert "exact:         no" in out
        assert "off_diagonal" in out

    def test_subspace(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "s.json", SHEAR)
        vectors = np.zeros((4, 2))
        vectors[0, 0] = vectors[2, 1] = 1.0
        subspace = write_subspace_file(tmp_path / "v.json", vectors)
        assert invoke(['project', '--input', str(path), '--subspace', str(subspace)]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["subspace"] is True
        assert document["vol_projected"] == pytest.approx(np.pi * np.sqrt(2), abs=1e-9)

    def test_lagrangian_subspace(self, tmp_path):
        path = write_matrix_file(tmp_path / "s.json", SHEAR)
        vectors = np.zeros((4, 2))
        vectors[0, 0] = vectors[1, 1] = 1.0
        subspace = write_subspace_file(tmp_path / "v.json", vectors)
        assert invoke(['project', '--input', str(path), '--subspace', str(subspace)]) == 5

    def test_not_symplectic(self, tmp_path):
        path = write_matrix_file(tmp_path / "s.json", np.diag([2.0, 2.0, 1.0, 1.0]))
        assert invoke(['project', '--input', str(path), '--na', '1']) == 4

    def test_split_required(self, tmp_path):
        path = write_matrix_file(tmp_path / "s.json", SHEAR)
        assert invoke(['project', '--input', str(path)]) == 2
        assert invoke(['project', '--input', str(path), '--na', '0']) == 2


class TestGenerate:
    """Tests for the gen-sp command."""

    def test_writes_file(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert invoke(['gen-sp', '--n', '3', '--spread', '0.5', '--seed', '1', '--out', str(out)]) == 0
        loaded = read_matrix_file(out)
        assert loaded.n == 3
        assert is_symplectic(loaded.matrix, 3)
        document = json.loads(capsys.readouterr().out)
        assert document["path"] == str(out)
        assert document["residual"] < 1e-9

    def test_text_summary(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert invoke(['--format', 'text', 'gen-sp', '--n', '2', '--out', str(out)]) == 0
        assert "Wrote 4x4 symplectic matrix" in capsys.readouterr().out

    def test_stdout_is_deterministic(self, capsys):
        assert invoke(['gen-sp', '--n', '2', '--seed', '3']) == 0
        first = capsys.readouterr().out
        assert invoke(['gen-sp', '--n', '2', '--seed', '3']) == 0
        assert capsys.readouterr().out == first
        assert json.loads(first)["ordering"] == "x-then-p"

    def test_existing_directory_keeps_mode(self, tmp_path):
        shared = tmp_path / "shared"
        shared.mkdir()
        shared.chmod(0o1777)
        assert invoke(['gen-sp', '--n', '1', '--out', str(shared / "s.json")]) == 0
        assert stat.S_IMODE(shared.stat().st_mode) == 0o1777

    def test_invalid_spread(self):
        assert invoke(['gen-sp', '--n', '2', '--spread', '0']) == 2


class TestVerify:
    """Tests for the verify command."""

    def test_small_campaign(self, capsys):
        argv = ['verify', '--n', '1', '2', '--cases', '2', '--seed', '3', '--samples', '200']
        assert invoke(argv) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["seed"] == 3
        assert document["counts"]["run"] == 4
        assert document["counts"]["failed"] == 0

    def test_text_summary(self, capsys):
        argv = ['--format', 'text', 'verify', '--n', '2', '--cases', '1', '--samples', '100']
        assert invoke(argv) == 0
        assert "run: 1  passed: 1  failed: 0" in capsys.readouterr().out

    def test_documented_example(self, capsys):
        argv = ['verify', '--n', '2', '--cases', '100', '--seed', '7', '--samples', '2000']
        assert invoke(argv) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["counts"]["run"] == 100
        assert document["counts"]["failed"] == 0

    def test_invalid_size(self):
        assert invoke(['verify', '--n', '0', '--cases', '1']) == 2

    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"verify": {"cases": 0}}), encoding="utf-8")
        assert invoke(['--config', str(config), 'verify']) == 0
        assert json.loads(capsys.readouterr().out)["counts"]["run"] == 0


class TestMain:
    """Tests for the process entry point."""

    def test_exit_code(self, tmp_path):
        path = write_matrix_file(tmp_path / "m.json", np.eye(2))
        with pytest.raises(SystemExit) as exc_info:
            main(['spectrum', '--input', str(path)])
        assert exc_info.value.code == 0

    def test_template_error_is_not_an_invariant_failure(self, tmp_path, monkeypatch):
        def broken(args, config, fmt):
            raise jinja2.TemplateError("missing template")

        monkeypatch.setitem(cli.COMMANDS, 'spectrum', broken)
        assert invoke(['spectrum', '--input', str(tmp_path / "m.json")]) == 2

    def test_unexpected_error(self, tmp_path, monkeypatch):
        def broken(args, config, fmt):
            raise RuntimeError("boom")

        monkeypatch.setitem(cli.COMMANDS, 'spectrum', broken)
        assert invoke(['spectrum', '--input', str(tmp_path / "m.json")]) == cli.EXIT_INTERNAL
        assert cli.EXIT_INTERNAL not in (0, 1, 2, 3, 4, 5)

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(['--version'])
        assert exc_info.value.code == 0
        assert "sympball" in capsys.readouterr().out


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
