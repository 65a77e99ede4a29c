"""
Configuration management for sympball.

Provides centralized configuration loading, validation, and access.
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Optional, Dict, Any, List

from .exceptions import ConfigurationError
from .matcore import Tolerance

logger = logging.getLogger("sympball.config")


# Default values
DEFAULTS: Dict[str, Any] = {
    'tolerance': {
        'rel': 1e-9,
        'abs': 1e-12,
    },
    'exactness': {
        'exact': 1e-8,
        'borderline': 1e-6,
        'noise_factor': 64.0,
    },
    'verify': {
        'n': [1, 2, 3],
        'cases': 100,
        'spread': [0.25, 1.0, 2.0],
        'seed': 7,
        'samples': 100000,
        'max_workers': 4,
        'max_n': 10,
    },
    'output': {
        'format': 'json',
        'log_level': 'INFO',
    },
}

VALID_FORMATS = ('json', 'text')
VALID_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class Config:
    """
    Configuration manager with defaults, environment overrides and validation.

    Features:
    - Load from JSON file (optional)
    - Default values for every setting
    - Environment variable overrides
    - Validation
    """

    ENV_MAPPINGS = {
        'SYMPBALL_LOG_LEVEL': ('output', 'log_level', str),
        'SYMPBALL_FORMAT': ('output', 'format', str),
        'SYMPBALL_SEED': ('verify', 'seed', int),
        'SYMPBALL_SAMPLES': ('verify', 'samples', int),
        'SYMPBALL_WORKERS': ('verify', 'max_workers', int),
    }

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize configuration.

        Args:
            config_file: Path to a JSON configuration file. When omitted,
                defaults and environment overrides are used.
        """
        self._config: Dict[str, Any] = {}
        self._config_file: Optional[Path] = None

        if config_file:
            self.load(config_file)
        else:
            self._finalize()

    def load(self, config_file: str) -> None:
        """
        Load configuration from file.

        Args:
            config_file: Path to the JSON file.

        Raises:
            ConfigurationError: If loading fails.
        """
        self._config_file = Path(config_file)

        if not self._config_file.exists():
            raise ConfigurationError(
                f"Configuration file not found: {config_file}"
            )

        try:
            with open(self._config_file, 'r', encoding='utf-8') as f:
                loaded = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid JSON in {config_file}: {e}")
        except OSError as e:
            raise ConfigurationError(f"Failed to load {config_file}: {e}")

        if not isinstance(loaded, dict):
            raise ConfigurationError(
                f"Configuration root must be an object in {config_file}"
            )
        self._config = loaded
        logger.info(f"Loaded configuration from {config_file}")
        self._finalize()

    def _finalize(self) -> None:
        self._apply_defaults()
        self._apply_env_overrides()
        self._validate()

    def _apply_defaults(self) -> None:
        """Apply default values for missing settings."""
        def merge_defaults(config: dict, defaults: dict) -> None:
            for key, value in defaults.items():
                if key not in config:
                    config[key] = copy.deepcopy(value)
                elif isinstance(value, dict) and isinstance(config.get(key), dict):
                    merge_defaults(config[key], value)

        merge_defaults(self._config, DEFAULTS)

    def _apply_env_overrides(self) -> None:
        """Apply environment variable overrides."""
        for env_var, (section, key, cast) in self.ENV_MAPPINGS.items():
            value = os.environ.get(env_var)
            if not value:
                continue
            try:
                converted = cast(value)
            except ValueError:
                logger.warning(f"Ignoring invalid value for {env_var}: {value!r}")
                continue
            if cast is str:
                converted = converted.lower() if key == 'format' else converted.upper()
            self._config.setdefault(section, {})[key] = converted
            logger.debug(f"Applied env override: {env_var}")

    def _validate(self) -> None:
        """Validate configuration."""
        errors: List[str] = []

        tolerance = self.get_section('tolerance')
        for key in ('rel', 'abs'):
            value = tolerance.get(key)
            if not isinstance(value, (int, float)) or value <= 0:
                errors.append(f"tolerance.{key} must be a positive number")

        exactness = self.get_section('exactness')
        lo, hi = exactness.get('exact'), exactness.get('borderline')
        if not all(isinstance(v, (int, float)) and v > 0 for v in (lo, hi)):
            errors.append("exactness.exact and exactness.borderline must be positive")
        elif lo >= hi:
            errors.append("exactness.exact must be smaller than exactness.borderline")
        noise = exactness.get('noise_factor')
        if not isinstance(noise, (int, float)) or noise < 0:
            errors.append("exactness.noise_factor must be a non-negative number")

        verify = self.get_section('verify')
        sizes = verify.get('n')
        if not isinstance(sizes, list) or not sizes or not all(
                isinstance(v, int) and v >= 1 for v in sizes):
            errors.append("verify.n must be a non-empty list of positive integers")
        elif max(sizes) > verify.get('max_n', 10):
            errors.append(f"verify.n exceeds verify.max_n ({verify.get('max_n')})")
        spreads = verify.get('spread')
        if not isinstance(spreads, list) or not spreads or not all(
                isinstance(v, (int, float)) and v > 0 for v in spreads):
            errors.append("verify.spread must be a non-empty list of positive numbers")
        for key in ('cases', 'samples'):
            value = verify.get(key)
            if not isinstance(value, int) or value < 0:
                errors.append(f"verify.{key} must be a non-negative integer")
        workers = verify.get('max_workers')
        if not isinstance(workers, int) or workers < 1:
            errors.append("verify.max_workers must be a positive integer")

        output = self.get_section('output')
        if output.get('format') not in VALID_FORMATS:
            errors.append(f"output.format must be one of {', '.join(VALID_FORMATS)}")
        if str(output.get('log_level', '')).upper() not in VALID_LOG_LEVELS:
            errors.append(f"output.log_level must be one of {', '.join(VALID_LOG_LEVELS)}")

        if errors:
            raise ConfigurationError(
                "Configuration validation failed:\n  - " +
                "\n  - ".join(errors)
            )

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value.

        Args:
            key: Configuration key (supports dot notation: 'verify.seed').
            default: Default value if key not found.

        Returns:
            Configuration value.
        """
        value: Any = self._config
        for part in key.split('.'):
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                return default
        return value

    def set(self, key: str, value: Any) -> None:
        """Set a configuration value (dot notation), e.g. from a CLI flag."""
        parts = key.split('.')
        target = self._config
        for part in parts[:-1]:
            target = target.setdefault(part, {})
        target[parts[-1]] = value

    def get_section(self, section: str) -> Dict[str, Any]:
        """Get entire configuration section (empty if not found)."""
        return self._config.get(section, {})

    @property
    def verify(self) -> Dict[str, Any]:
        """Get verification campaign configuration."""
        return self.get_section('verify')

    @property
    def exactness(self) -> Dict[str, Any]:
        """Get exactness thresholds."""
        return self.get_section('exactness')

    @property
    def output(self) -> Dict[str, Any]:
        """Get output configuration."""
        return self.get_section('output')

    @property
    def tolerance(self) -> Tolerance:
        """Get the numerical tolerance."""
        section = self.get_section('tolerance')
        return Tolerance(rel=float(section['rel']), abs=float(section['abs']))

    @property
    def log_level(self) -> str:
        return str(self.get('output.log_level', 'INFO')).upper()

    def to_dict(self) -> Dict[str, Any]:
        """Return configuration as dictionary."""
        return copy.deepcopy(self._config)
