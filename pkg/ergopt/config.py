"""
Configuration management for ergopt.

Settings come from three layers, lowest priority first:
- built-in defaults (DEFAULT_CONFIG)
- a YAML/JSON file (config/app-config.yaml, or ERGOPT_CONFIG)
- environment placeholders of the form ${VAR:default} inside that file

The merged dictionary is validated against CONFIG_SCHEMA before being frozen
into a Settings object.
"""

import copy
import json
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import jsonschema
import yaml
from dotenv import load_dotenv

from ergopt.core.errors import ConfigValidationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "app-config.yaml"

DEFAULT_CONFIG: Dict[str, Any] = {
    "global": {
        "service_name": "ergopt",
        "version": "1.0.0",
        "logging": {
            "level": "INFO",
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        },
    },
    "numerics": {
        "arithmetic": "auto",
        "exact_edge_limit": 200,
        "float_tolerance": 1e-9,
        "clamp_tolerance": 1e-9,
        "max_pivots": 50000,
    },
    "budgets": {
        "cycle_cap": 200000,
        "cocycle_horizon_cap": 14,
        "bnb_node_budget": 2000000,
        "measure_max_doublings": 10,
        "monte_carlo_samples": 200,
        "word_enumeration_cap": 20000,
    },
    "orbit": {
        "initial_block": 16,
        "growth_factor": 4,
        "default_seed": 0,
        "acceptance_tolerance": 0.05,
    },
    "spectrum": {
        "workers": 1,
    },
}

_positive_int = {"type": "integer", "minimum": 1}
_positive_number = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "global": {
            "type": "object",
            "properties": {
                "service_name": {"type": "string"},
                "version": {"type": "string"},
                "logging": {
                    "type": "object",
                    "properties": {
                        "level": {"enum": ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]},
                        "format": {"type": "string"},
                    },
                },
            },
        },
        "numerics": {
            "type": "object",
            "properties": {
                "arithmetic": {"enum": ["auto", "exact", "float"]},
                "exact_edge_limit": _positive_int,
                "float_tolerance": _positive_number,
                "clamp_tolerance": {"type": "number", "minimum": 0},
                "max_pivots": _positive_int,
            },
            "additionalProperties": False,
        },
        "budgets": {
            "type": "object",
            "properties": {
                "cycle_cap": _positive_int,
                "cocycle_horizon_cap": _positive_int,
                "bnb_node_budget": _positive_int,
                "measure_max_doublings": _positive_int,
                "monte_carlo_samples": _positive_int,
                "word_enumeration_cap": _positive_int,
            },
            "additionalProperties": False,
        },
        "orbit": {
            "type": "object",
            "properties": {
                "initial_block": _positive_int,
                "growth_factor": {"type": "integer", "minimum": 2},
                "default_seed": {"type": "integer", "minimum": 0},
                "acceptance_tolerance": _positive_number,
            },
            "additionalProperties": False,
        },
        "spectrum": {
            "type": "object",
            "properties": {"workers": _positive_int},
            "additionalProperties": False,
        },
    },
}

_PLACEHOLDER = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)(?::([^}]*))?\}")


@dataclass(frozen=True)
class NumericsSettings:
    arithmetic: str = "auto"
    exact_edge_limit: int = 200
    float_tolerance: float = 1e-9
    clamp_tolerance: float = 1e-9
    max_pivots: int = 50000


@dataclass(frozen=True)
class BudgetSettings:
    cycle_cap: int = 200000
    cocycle_horizon_cap: int = 14
    bnb_node_budget: int = 2000000
    measure_max_doublings: int = 10
    monte_carlo_samples: int = 200
    word_enumeration_cap: int = 20000


@dataclass(frozen=True)
class OrbitSettings:
    initial_block: int = 16
    growth_factor: int = 4
    default_seed: int = 0
    acceptance_tolerance: float = 0.05


@dataclass(frozen=True)
class Settings:
    """Frozen view of the merged configuration."""

    service_name: str = "ergopt"
    version: str = "1.0.0"
    log_level: str = "INFO"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    numerics: NumericsSettings = field(default_factory=NumericsSettings)
    budgets: BudgetSettings = field(default_factory=BudgetSettings)
    orbit: OrbitSettings = field(default_factory=OrbitSettings)
    spectrum_workers: int = 1

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "Settings":
        glob = config.get("global", {})
        log = glob.get("logging", {})
        return cls(
            service_name=glob.get("service_name", "ergopt"),
            version=str(glob.get("version", "1.0.0")),
            log_level=log.get("level", "INFO"),
            log_format=log.get("format", DEFAULT_CONFIG["global"]["logging"]["format"]),
            numerics=NumericsSettings(**config.get("numerics", {})),
            budgets=BudgetSettings(**config.get("budgets", {})),
            orbit=OrbitSettings(**config.get("orbit", {})),
            spectrum_workers=config.get("spectrum", {}).get("workers", 1),
        )

    def with_overrides(self, **numerics: Any) -> "Settings":
        """Copy with selected numerics fields replaced (e.g. arithmetic="float")."""
        merged = {**self.numerics.__dict__, **numerics}
        return Settings(
            service_name=self.service_name,
            version=self.version,
            log_level=self.log_level,
            log_format=self.log_format,
            numerics=NumericsSettings(**merged),
            budgets=self.budgets,
            orbit=self.orbit,
            spectrum_workers=self.spectrum_workers,
        )


def _expand_placeholders(value: Any) -> Any:
    """Replace ${VAR:default} in strings, recursing through containers."""
    if isinstance(value, dict):
        return {k: _expand_placeholders(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_expand_placeholders(v) for v in value]
    if not isinstance(value, str):
        return value

    match = _PLACEHOLDER.fullmatch(value.strip())
    if match:
        # a whole-value placeholder re-parses as YAML so numbers stay numbers
        raw = os.environ.get(match.group(1), match.group(2) or "")
        return yaml.safe_load(raw) if raw != "" else None
    return _PLACEHOLDER.sub(lambda m: os.environ.get(m.group(1), m.group(2) or ""), value)


def _merge_config(base: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge_config(merged[key], value)
        else:
            merged[key] = value
    return merged


def validate_config(config: Dict[str, Any]) -> List[str]:
    """Validate configuration against CONFIG_SCHEMA; returns error strings."""
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    return [
        f"{'.'.join(str(p) for p in error.path)}: {error.message}"
        for error in validator.iter_errors(config)
    ]


def load_config(config_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Load configuration from YAML or JSON file, merged over defaults."""
    load_dotenv()
    path = config_path or os.environ.get("ERGOPT_CONFIG")
    path = Path(path) if path else DEFAULT_CONFIG_PATH

    file_config: Dict[str, Any] = {}
    if path.exists():
        try:
            with open(path, "r", encoding="utf-8") as f:
                if path.suffix in (".yaml", ".yml"):
                    file_config = yaml.safe_load(f) or {}
                elif path.suffix == ".json":
                    file_config = json.load(f)
                else:
                    raise ConfigValidationError(f"Config file must be YAML or JSON: {path}")
        except (yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigValidationError(f"Error parsing {path}: {e}")
    elif config_path:
        raise ConfigValidationError(f"Configuration file not found: {path}")
    else:
        logger.debug(f"No configuration file at {path}; using defaults")

    config = _merge_config(DEFAULT_CONFIG, _expand_placeholders(file_config))
    errors = validate_config(config)
    if errors:
        raise ConfigValidationError(f"Schema validation failed: {errors}")
    return config


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide default settings, loaded lazily."""
    global _settings
    if _settings is None:
        _settings = Settings.from_dict(load_config())
    return _settings


def set_settings(settings: Optional[Settings]) -> None:
    global _settings
    _settings = settings
