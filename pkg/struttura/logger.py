"""
Logger module for the fockbundle tools with daily log rotation.
Creates a new log file each day in the logs/ directory.
"""
import os
import sys
import datetime
import logging
import tempfile
import threading
from logging.handlers import TimedRotatingFileHandler
from typing import Optional

DEFAULT_LOG_DIR = os.path.abspath(os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'logs'))

# Configure logging
LOG_FORMAT = '%(asctime)s [%(levelname)s] %(message)s'
LOG_LEVELS = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL
}

# Create a lock for thread-safe logger setup
_log_lock = threading.Lock()


def get_log_dir() -> str:
    """Return the log directory, creating it if needed.

    ``FOCKBUNDLE_LOG_DIR`` overrides the project-local ``logs/`` directory.
    Falls back to the system temp directory when neither can be created.
    """
    log_dir = os.environ.get('FOCKBUNDLE_LOG_DIR') or DEFAULT_LOG_DIR
    try:
        os.makedirs(log_dir, exist_ok=True)
    except OSError:
        log_dir = os.path.join(tempfile.gettempdir(), 'fockbundle-logs')
        os.makedirs(log_dir, exist_ok=True)
    return log_dir


class DailyRotatingFileHandler(TimedRotatingFileHandler):
    """Custom handler that rotates logs at midnight and keeps a backup of old logs.
    Creates files with names like 'fockbundle_YYYY-MM-DD.log'.
    """
    def __init__(self, filename, log_dir=None, **kwargs):
        self.filename = filename
        self.log_dir = log_dir or get_log_dir()
        self.current_date = datetime.datetime.now().strftime("%Y-%m-%d")
        self.baseFilename = os.path.join(self.log_dir, f"{filename}_{self.current_date}.log")

        # The date lives in the file name, rollover is driven by shouldRollover
        super().__init__(
            self.baseFilename,
            when='midnight',
            interval=3650,
            backupCount=30,
            encoding='utf-8',
            **kwargs
        )

    def shouldRollover(self, record):
        """Roll over when the calendar date has changed."""
        current_date = datetime.datetime.now().strftime("%Y-%m-%d")
        return current_date != self.current_date

    def doRollover(self):
        """Create a new log file with the current date."""
        if self.stream:
            self.stream.close()
            self.stream = None

        self.current_date = datetime.datetime.now().strftime("%Y-%m-%d")
        self.baseFilename = os.path.join(self.log_dir, f"{self.filename}_{self.current_date}.log")

        if not self.delay:
            self.stream = self._open()

        self._clean_old_logs()

    def _clean_old_logs(self):
        """Remove log files older than backupCount days."""
        if self.backupCount <= 0:
            return

        base_name = os.path.basename(self.filename)
        log_files = []

        for f in os.listdir(self.log_dir):
            if f.startswith(base_name) and f.endswith('.log'):
                try:
                    date_str = f.replace(f"{base_name}_", "").replace(".log", "")
                    file_date = datetime.datetime.strptime(date_str, "%Y-%m-%d")
                    log_files.append((file_date, os.path.join(self.log_dir, f)))
                except ValueError:
                    continue

        log_files.sort()

        while len(log_files) > self.backupCount:
            _, old_file = log_files.pop(0)
            try:
                os.remove(old_file)
            except OSError:
                pass


def setup_logger(name='fockbundle', console_level='WARNING', log_dir=None):
    """Set up and return a logger with daily rotation.

    The console handler writes to stderr so that stdout stays free for
    JSON reports.

    Args:
        name (str): Name of the logger
        console_level (str): Level name for the console handler
        log_dir (str): Directory for the rotating log file

    Returns:
        logging.Logger: Configured logger instance
    """
    with _log_lock:
        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)

        # Don't propagate to root logger
        logger.propagate = False

        formatter = logging.Formatter(LOG_FORMAT)

        file_handler = DailyRotatingFileHandler(name, log_dir=log_dir)
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler.setLevel(LOG_LEVELS.get(str(console_level).upper(), logging.WARNING))

        for handler in logger.handlers[:]:
            logger.removeHandler(handler)
            handler.close()

        logger.addHandler(file_handler)
        logger.addHandler(console_handler)

    return logger


def get_logger() -> logging.Logger:
    """Return the package logger, configuring it on first use."""
    logger = logging.getLogger('fockbundle')
    if not logger.handlers:
        logger = setup_logger()
    return logger


# Convenience functions
def log_debug(message):
    """Log a debug message."""
    get_logger().debug(message)


def log_info(message):
    """Log an info message."""
    get_logger().info(message)


def log_warning(message):
    """Log a warning message."""
    get_logger().warning(message)


def log_error(message):
    """Log an error message."""
    get_logger().error(message)


def log_critical(message):
    """Log a critical message."""
    get_logger().critical(message)


def log_exception(exception, message: Optional[str] = None):
    """Log an exception with an optional message."""
    if message:
        get_logger().error(message, exc_info=exception)
    else:
        get_logger().error(str(exception), exc_info=exception)


def setup_global_exception_logging():
    """Set up global exception handling to log all uncaught exceptions."""
    def handle_exception(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        get_logger().critical("Uncaught exception",
                              exc_info=(exc_type, exc_value, exc_traceback))

    sys.excepthook = handle_exception
