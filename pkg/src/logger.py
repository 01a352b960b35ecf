"""
Logging utilities and colored console output for fewsolve.

Console output goes to stderr so stdout stays reserved for JSON reports.
"""

import logging
import os
import sys


class ColoredFormatter(logging.Formatter):
    """Custom formatter with color support for different log levels"""

    # ANSI color codes
    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[41m",  # Red background
        "RESET": "\033[0m",  # Reset to default
    }

    CONFIG_PREFIXES = ("CONFIGURATION:", "Backend:", "Solver:", "Workers:")

    def __init__(self, use_color=None):
        super().__init__()
        if use_color is None:
            use_color = hasattr(sys.stderr, "isatty") and sys.stderr.isatty()
        self.use_color = use_color

    def classify(self, record):
        """Return (prefix, color) for a record based on its content."""
        message = record.getMessage()
        lowered = message.lower()
        if message.startswith("STEP ") or "FEWSOLVE" in message:
            return "EXECUTE", "\033[35m"
        if message.startswith("Progress:"):
            return "PROGRESS", "\033[34m"
        if message.startswith(self.CONFIG_PREFIXES):
            return "CONFIG", "\033[36m"
        if record.levelname in ("ERROR", "CRITICAL") or "error" in lowered:
            return "ERROR", "\033[31m"
        if record.levelname == "WARNING" or "warning" in lowered:
            return "WARNING", "\033[33m"
        if record.levelname == "DEBUG":
            return "DEBUG", self.COLORS["DEBUG"]
        if "completed" in lowered or "success" in lowered or "passed" in lowered:
            return "SUCCESS", "\033[32m"
        return "INFO", "\033[37m"

    def format(self, record):
        prefix, color = self.classify(record)
        message = record.getMessage()
        if record.exc_info:
            message = f"{message}\n{self.formatException(record.exc_info)}"
        if not self.use_color:
            return f"[{prefix}] {message}"
        return f"{color}[{prefix}]{self.COLORS['RESET']} {message}"


def _level_from_env(default="WARNING"):
    name = os.environ.get("FEWSOLVE_LOG_LEVEL", default).upper()
    return getattr(logging, name, logging.WARNING)


def setup_logger():
    """Set up the package logger with a stderr console handler and an optional file."""
    logger = logging.getLogger("fewsolve")
    logger.setLevel(_level_from_env())
    logger.handlers = []  # Clear any existing handlers to avoid duplicates
    logger.propagate = False

    log_file = os.environ.get("FEWSOLVE_LOG_FILE")
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
        file_handler.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s"))
        logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(ColoredFormatter())
    logger.addHandler(console_handler)

    return logger


# Initialize logger
logger = setup_logger()


def set_verbosity(verbose):
    """Lower the level to INFO (or DEBUG when verbose > 1)."""
    if verbose > 1:
        logger.setLevel(logging.DEBUG)
    elif verbose == 1:
        logger.setLevel(logging.INFO)


def log_step(message):
    """Log a major processing step with visual separation"""
    logger.info(f"STEP {message}")


def log_progress(percentage, count=None, total=None, extra_info=None):
    """Log a progress update in a standardized format"""
    if count is not None and total is not None:
        progress_msg = f"Progress: {percentage:.1f}% ({count}/{total})"
    else:
        progress_msg = f"Progress: {percentage:.1f}%"

    if extra_info:
        progress_msg += f" - {extra_info}"

    logger.info(progress_msg)


def log_error(message):
    """Log an error message with proper formatting"""
    logger.error(message)


def log_success(message):
    """Log a success message with proper formatting"""
    logger.info(message)


def format_time(seconds):
    """Format time duration in a human-readable format."""
    if seconds < 60:
        return f"{seconds:.2f} seconds"
    elif seconds < 3600:
        minutes = seconds // 60
        remaining_seconds = seconds % 60
        return f"{int(minutes)} minutes {int(remaining_seconds)} seconds"
    else:
        hours = seconds // 3600
        minutes = (seconds % 3600) // 60
        remaining_seconds = seconds % 60
        return f"{int(hours)} hours {int(minutes)} minutes {int(remaining_seconds)} seconds"
