"""Structured logging configuration for the spin-cavity toolkit."""

import logging
import sys
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
ROOT_NAME = 'spincavity'

SUBSYSTEMS = (
    'model', 'dynamics', 'entanglement', 'perturbation',
    'disorder', 'optimizer', 'trotter', 'cli', 'main',
)


class ColoredFormatter(logging.Formatter):
    """Formatter that colors the level name on terminals."""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def format(self, record):
        original = record.levelname
        color = self.COLORS.get(original)
        if color:
            record.levelname = f"{color}{original}{self.RESET}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


def _console_handler() -> logging.Handler:
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(ColoredFormatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    return handler


def get_logger(name: str = ROOT_NAME, level: Optional[str] = None) -> logging.Logger:
    """
    Get a logger inside the toolkit namespace.

    Handlers are attached to the root by configure_logging; library loggers
    only set their level and propagate.

    Args:
        name: Logger name, prefixed with the toolkit namespace if needed
        level: Optional level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)

    Returns:
        Logger instance
    """
    if name != ROOT_NAME and not name.startswith(ROOT_NAME + '.'):
        name = f"{ROOT_NAME}.{name}"
    logger = logging.getLogger(name)
    if level:
        logger.setLevel(getattr(logging, level.upper()))
    return logger


def get_subsystem_logger(subsystem: str) -> logging.Logger:
    """Get the logger of one library subsystem (see SUBSYSTEMS)."""
    if subsystem not in SUBSYSTEMS:
        raise ValueError(f"Unknown logging subsystem: {subsystem}")
    return get_logger(f"{ROOT_NAME}.{subsystem}")


def get_model_logger() -> logging.Logger:
    """Get logger for Hamiltonian construction."""
    return get_subsystem_logger('model')


def get_dynamics_logger() -> logging.Logger:
    """Get logger for unitary and dissipative evolution."""
    return get_subsystem_logger('dynamics')


def get_optimizer_logger() -> logging.Logger:
    """Get logger for parameter engineering."""
    return get_subsystem_logger('optimizer')


def get_cli_logger() -> logging.Logger:
    """Get logger for experiment runs."""
    return get_subsystem_logger('cli')


def get_main_logger() -> logging.Logger:
    """Get logger for the command-line entry point."""
    return get_subsystem_logger('main')


def configure_logging(level: str = 'INFO', quiet: bool = False, log_file: Optional[str] = None) -> None:
    """
    Configure logging for a whole run.

    Args:
        level: Global log level
        quiet: If True, suppress all logging output
        log_file: Optional file path that receives an uncolored copy of the log
    """
    if quiet:
        logging.disable(logging.CRITICAL)
        return
    logging.disable(logging.NOTSET)

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.addHandler(_console_handler())

    if log_file:
        try:
            file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
            file_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
            root_logger.addHandler(file_handler)
        except OSError as e:
            root_logger.warning(f"Could not open log file {log_file}: {e}")


def disable_external_logging() -> None:
    """Quiet chatty third-party loggers."""
    for name in ('matplotlib', 'matplotlib.font_manager', 'PIL'):
        logging.getLogger(name).setLevel(logging.WARNING)
