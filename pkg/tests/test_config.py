"""
Tests for configuration loading, overrides and validation.
"""

import json
import pytest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from sympball.config import Config, DEFAULTS
from sympball.exceptions import ConfigurationError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in Config.ENV_MAPPINGS:
        monkeypatch.delenv(name, raising=False)


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestDefaults:
    """Tests for the built-in defaults."""

    def test_defaults_without_file(self):
        config = Config()
        assert config.verify['cases'] == DEFAULTS['verify']['cases']
        assert config.output['format'] == 'json'
        assert config.log_level == 'INFO'
        assert config.tolerance.rel == 1e-9
        assert config.tolerance.abs == 1e-12

    def test_defaults_are_not_shared(self):
        config = Config()
        config.set('verify.n', [4])
        assert DEFAULTS['verify']['n'] == [1, 2, 3]

    def test_partial_file_is_completed(self, tmp_path):
        config = Config(write_config(tmp_path, {"verify": {"cases": 5}}))
        assert config.verify['cases'] == 5
        assert config.verify['seed'] == DEFAULTS['verify']['seed']
        assert config.exactness['exact'] == 1e-8
        assert config.exactness['noise_factor'] == 64.0


class TestAccess:
    """Tests for dotted access."""

    def test_get(self):
        config = Config()
        assert config.get('verify.seed') == 7
        assert config.get('verify.missing', 'x') == 'x'
        assert config.get('nothing.at.all') is None

    def test_set(self):
        config = Config()
        config.set('verify.seed', 11)
        assert config.get('verify.seed') == 11
        config.set('extra.value', 1)
        assert config.get_section('extra') == {'value': 1}

    def test_to_dict_is_a_copy(self):
        config = Config()
        data = config.to_dict()
        data['verify']['seed'] = 99
        assert config.get('verify.seed') == 7


class TestEnvironment:
    """Tests for environment overrides."""

    def test_overrides(self, monkeypatch):
        monkeypatch.setenv('SYMPBALL_SEED', '42')
        monkeypatch.setenv('SYMPBALL_FORMAT', 'TEXT')
        monkeypatch.setenv('SYMPBALL_LOG_LEVEL', 'debug')
        config = Config()
        assert config.verify['seed'] == 42
        assert config.output['format'] == 'text'
        assert config.log_level == 'DEBUG'

    def test_invalid_value_is_ignored(self, monkeypatch):
        monkeypatch.setenv('SYMPBALL_SAMPLES', 'many')
        assert Config().verify['samples'] == DEFAULTS['verify']['samples']

    def test_environment_beats_file(self, tmp_path, monkeypatch):
        monkeypatch.setenv('SYMPBALL_WORKERS', '2')
        config = Config(write_config(tmp_path, {"verify": {"max_workers": 8}}))
        assert config.verify['max_workers'] == 2


class TestValidation:
    """Tests for configuration validation."""

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            Config(str(tmp_path / "missing.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            Config(str(path))

    def test_root_must_be_object(self, tmp_path):
        with pytest.raises(ConfigurationError):
            Config(write_config(tmp_path, [1, 2]))

    @pytest.mark.parametrize("data", [
        {"tolerance": {"rel": 0}},
        {"exactness": {"exact": 1e-5, "borderline": 1e-6}},
        {"exactness": {"noise_factor": -1}},
        {"verify": {"n": []}},
        {"verify": {"n": [11]}},
        {"verify": {"spread": [0.0]}},
        {"verify": {"cases": -1}},
        {"verify": {"max_workers": 0}},
        {"output": {"format": "xml"}},
        {"output": {"log_level": "LOUD"}},
    ])
    def test_invalid_values(self, tmp_path, data):
        with pytest.raises(ConfigurationError) as exc_info:
            Config(write_config(tmp_path, data))
        assert exc_info.value.exit_code == 2

    def test_all_errors_reported(self, tmp_path):
        with pytest.raises(ConfigurationError) as exc_info:
            Config(write_config(tmp_path, {"verify": {"cases": -1, "max_workers": 0}}))
        message = str(exc_info.value)
        assert "verify.cases" in message
        assert "verify.max_workers" in message


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
