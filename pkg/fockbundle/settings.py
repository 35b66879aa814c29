"""
Runtime settings shared by the numerical modules.

Defaults come from ``config.Config``; a ConfigManager (file, dict and
``FOCKBUNDLE_`` environment layers) may be installed by the CLI, and
tolerance overrides can be scoped to a block of work.
"""
import contextlib
import contextvars
import logging
import os
from typing import Dict, Iterator, Optional

from config import Config
from struttura.config import ConfigManager

logger = logging.getLogger(__name__)

_manager: Optional[ConfigManager] = None
_overrides: contextvars.ContextVar = contextvars.ContextVar('tolerance_overrides', default={})


def install(manager: Optional[ConfigManager]) -> None:
    """Make ``manager`` the source of configured values (None resets)."""
    global _manager
    _manager = manager


def manager() -> ConfigManager:
    global _manager
    if _manager is None:
        _manager = ConfigManager()
    return _manager


def tolerance(name: str) -> float:
    """Active tolerance ``name``: scoped override, configuration, default."""
    scoped = _overrides.get()
    if name in scoped:
        return float(scoped[name])
    value = manager().get(f"tolerances.{name}")
    if value is None:
        return Config.tolerance(name)
    return float(value)


def tolerance_table() -> Dict[str, float]:
    """Every tolerance as currently in effect."""
    return {name: tolerance(name) for name in sorted(set(Config.TOLERANCES) | set(_overrides.get()))}


@contextlib.contextmanager
def override_tolerances(values: Dict[str, float]) -> Iterator[None]:
    merged = dict(_overrides.get())
    merged.update({k: float(v) for k, v in values.items()})
    token = _overrides.set(merged)
    try:
        yield
    finally:
        _overrides.reset(token)


def max_fock_dim() -> int:
    """Fock dimension guard; the environment variable wins."""
    if os.environ.get('FOCKBUNDLE_MAX_FOCK_DIM'):
        return Config.max_fock_dim()
    return int(manager().get('fock.max_dim', Config.MAX_FOCK_DIM))


def get(key: str, default=None):
    return manager().get(key, default)
