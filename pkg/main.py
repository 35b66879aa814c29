#!/usr/bin/env python3
"""
Main entry point for the fockbundle command line.
"""
import sys
import logging

from config import Config
from struttura.logger import setup_logger, setup_global_exception_logging


def configure_logging():
    """Configure logging for the application."""
    setup_logger('fockbundle', console_level=Config.LOG_LEVEL, log_dir=Config.LOG_DIR)
    setup_global_exception_logging()


def main(argv=None):
    """Main entry point for the application."""
    # Configure logging
    configure_logging()
    logger = logging.getLogger('fockbundle')

    try:
        from fockbundle.cli import run
        return run(argv)
    except Exception as e:
        logger.error(f"fockbundle failed: {e}", exc_info=True)
        return 1


if __name__ == '__main__':
    sys.exit(main())
