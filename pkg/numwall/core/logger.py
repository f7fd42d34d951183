"""
Logging functionality for numwall
"""
import os
import logging
from datetime import datetime
from pathlib import Path

from numwall.core.constants import DEFAULT_HOME_DIR, HOME_ENV_VAR

def setup_logger(level=logging.INFO, log_to_file=True, log_dir=None):
    """
    Set up the application logger

    Args:
        level (int or str, optional): Console log level
        log_to_file (bool, optional): Whether to also write a DEBUG log file
        log_dir (str, optional): Directory for log files, defaults to ~/.numwall/logs

    Returns:
        logging.Logger: The configured 'numwall' logger
    """
    # Create a logger
    logger = logging.getLogger('numwall')
    logger.setLevel(logging.DEBUG)

    # Repeated calls (tests, library use) replace our handlers instead of stacking them
    for handler in list(logger.handlers):
        if getattr(handler, '_numwall', False):
            logger.removeHandler(handler)
            handler.close()

    if isinstance(level, str):
        level = logging.getLevelName(level.upper())

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
    console_handler._numwall = True
    logger.addHandler(console_handler)

    if log_to_file:
        if log_dir is None:
            home = os.environ.get(HOME_ENV_VAR, DEFAULT_HOME_DIR)
            log_dir = os.path.join(home, 'logs')

        # Ensure log directory exists
        Path(log_dir).mkdir(parents=True, exist_ok=True)

        # Create log file name with timestamp
        timestamp = datetime.now().strftime("%Y%m%d-%H%M%S")
        log_file = os.path.join(log_dir, f"numwall-{timestamp}.log")

        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'))
        file_handler._numwall = True
        logger.addHandler(file_handler)

        logger.debug(f"Logging initialized - Log file: {log_file}")

    return logger
