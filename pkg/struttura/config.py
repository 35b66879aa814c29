"""
Configuration manager for the fockbundle tools.

Settings are merged from built-in defaults, an optional JSON or YAML file,
an optional dictionary and ``FOCKBUNDLE_`` environment variables, in that
order of precedence (later wins).
"""
import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

logger = logging.getLogger(__name__)

ENV_PREFIX = 'FOCKBUNDLE_'

# Environment names that do not follow the SECTION_KEY pattern
ENV_ALIASES = {
    'FOCKBUNDLE_MAX_FOCK_DIM': 'fock.max_dim',
    'FOCKBUNDLE_LOG_DIR': 'logging.dir',
    'FOCKBUNDLE_LOG_LEVEL': 'logging.level',
}

SENSITIVE_MARKERS = ('password', 'secret', 'api_key', 'token')


def _default_config() -> Dict[str, Any]:
    from config import Config
    return Config.as_dict()


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ConfigManager:
    """Layered configuration with dotted-key access."""

    def __init__(
        self,
        config_file: Optional[Union[str, Path]] = None,
        config_dict: Optional[Dict[str, Any]] = None,
        default_config: Optional[Dict[str, Any]] = None,
        env_prefix: str = ENV_PREFIX,
    ):
        """Build the configuration.

        Args:
            config_file: JSON (``.json``) or YAML (``.yaml``/``.yml``) file
            config_dict: Values applied after the file
            default_config: Base values, the project defaults if omitted
            env_prefix: Prefix of overriding environment variables
        """
        self.env_prefix = env_prefix
        self._config = copy.deepcopy(default_config) if default_config is not None else _default_config()
        if config_file is not None:
            self._config = _deep_merge(self._config, self._load_file(Path(config_file)))
        if config_dict is not None:
            self._config = _deep_merge(self._config, config_dict)
        self._apply_environment()

    def _load_file(self, path: Path) -> Dict[str, Any]:
        if not path.exists():
            logger.warning(f"Config file {path} not found, using defaults")
            return {}
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                if path.suffix.lower() in ('.yaml', '.yml'):
                    data = yaml.safe_load(handle) or {}
                else:
                    data = json.load(handle)
        except (OSError, ValueError, yaml.YAMLError) as e:
            logger.error(f"Failed to read config file {path}: {e}")
            return {}
        if not isinstance(data, dict):
            logger.error(f"Config file {path} does not contain a mapping")
            return {}
        return data

    def _apply_environment(self) -> None:
        for name, raw in os.environ.items():
            if not name.startswith(self.env_prefix):
                continue
            if name in ENV_ALIASES:
                key = ENV_ALIASES[name]
            else:
                rest = name[len(self.env_prefix):].lower()
                if '_' not in rest:
                    continue
                section, option = rest.split('_', 1)
                key = f"{section}.{option}"
            self.update(key, self._parse_value(raw))

    @staticmethod
    def _parse_value(value: str) -> Any:
        """Convert an environment string to int, float, bool or str."""
        if value.lower() in ('true', 'false'):
            return value.lower() == 'true'
        try:
            return int(value)
        except ValueError:
            pass
        try:
            return float(value)
        except ValueError:
            return value

    def get(self, key: str, default: Any = None) -> Any:
        node: Any = self._config
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def get_section(self, section: str) -> Optional[Dict[str, Any]]:
        value = self._config.get(section)
        return copy.deepcopy(value) if isinstance(value, dict) else None

    def update(self, key: str, value: Any) -> None:
        parts = key.split('.')
        node = self._config
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[parts[-1]] = value

    def update_section(self, section: str, values: Dict[str, Any]) -> None:
        current = self._config.get(section)
        if not isinstance(current, dict):
            current = {}
        self._config[section] = _deep_merge(current, values)

    def tolerances(self) -> Dict[str, float]:
        """The tolerance table as floats."""
        return {k: float(v) for k, v in (self.get_section('tolerances') or {}).items()}

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._config)

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            if path.suffix.lower() in ('.yaml', '.yml'):
                yaml.safe_dump(self._config, handle, sort_keys=True)
            else:
                json.dump(self._config, handle, indent=2)
        logger.info(f"Configuration saved to {path}")

    def _redacted(self, node: Any) -> Any:
        if isinstance(node, dict):
            return {
                k: ('***' if any(m in k.lower() for m in SENSITIVE_MARKERS) else self._redacted(v))
                for k, v in node.items()
            }
        return node

    def __str__(self) -> str:
        return json.dumps(self._redacted(self._config), indent=2, sort_keys=True, default=str)

    def __repr__(self) -> str:
        return f"ConfigManager(sections={sorted(self._config)})"
