"""
JSON reports: a ``checks`` array of {name, value, tolerance, pass} entries
next to the computed data, with the tolerance table in effect.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from struttura.version import __version__

from . import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: Optional[float]
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        value = self.value
        if isinstance(value, float) and not math.isfinite(value):
            value = None
        return {'name': self.name, 'value': value, 'tolerance': self.tolerance, 'pass': self.passed}


@dataclass
class Report:
    """Result document of one job."""
    command: str
    seed: int = 0
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def check(self, name: str, value: float, tolerance: Optional[float] = None, passed: Optional[bool] = None) -> Check:
        """Record ``value <= tolerance`` (or an explicit verdict)."""
        value = float(value) if value is not None else float('nan')
        if passed is None:
            passed = tolerance is not None and math.isfinite(value) and value <= tolerance
        entry = Check(name, value, None if tolerance is None else float(tolerance), bool(passed))
        self.checks.append(entry)
        if not entry.passed:
            logger.info(f"Check {name} failed: {value:.3e} against {tolerance}")
        return entry

    def verdict(self, name: str, ok: bool, value: float = 0.0) -> Check:
        return self.check(name, value, None, ok)

    def add(self, key: str, value: Any) -> None:
        self.data[key] = value

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'seed': self.seed,
            'version': __version__,
            'pass': self.passed,
            'checks': [c.to_dict() for c in self.checks],
            'tolerances': settings.tolerance_table(),
            'data': self.data,
        }


def error_document(exc: BaseException) -> Dict[str, Any]:
    """Machine-readable error object for input errors."""
    details = getattr(exc, 'details', None) or {}
    return {'error': {'type': type(exc).__name__, 'message': str(exc), 'details': details}}
