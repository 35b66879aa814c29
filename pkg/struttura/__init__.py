"""
struttura package - Support components for the fockbundle tools.

This package contains the logging, configuration and version helpers used
throughout the project.
"""

from .config import ConfigManager
from .logger import setup_logger, setup_global_exception_logging
from .version import __version__, get_version, get_version_info

__all__ = [
    'ConfigManager',
    'setup_logger',
    'setup_global_exception_logging',
    '__version__',
    'get_version',
    'get_version_info',
]
