import logging
import sys
import traceback
from collections.abc import Callable
from datetime import datetime
from importlib import metadata
from typing import Any, Optional, Union

DEBUG = 10
INFO = 20
WARNING = 30
ERROR = 40
# Messages at or above this severity raise once logged.
CRASH_ON = ERROR
SEVERITY_NAMES = {DEBUG: "DEBUG", INFO: "INFO", WARNING: "WARNING", ERROR: "ERROR"}
# Packages whose versions are written to the log at the start of every run.
LOGGED_PACKAGES = ("numpy", "scipy", "torch", "pandas", "filterpy", "joblib", "tqdm", "matplotlib", "pillow")
LOGGER_NAME = "reidtrack"

_minimum_print_severity = INFO
_log_file_path: Optional[str] = None


def set_log_config(minimum_print_severity: int = INFO, log_file_path: Optional[str] = None) -> None:
    """
    Choose what is printed and where every message is kept. Set to the defaults on import, a run points it at its
    output directory once that is known.

    Args:
        minimum_print_severity (int, optional): messages below this severity are only written to the log file.
            Default: INFO.
        log_file_path (str, optional): file every message is appended to. Default: no log file.
    """
    global _minimum_print_severity, _log_file_path
    _minimum_print_severity = minimum_print_severity
    _log_file_path = log_file_path

    logging.basicConfig(format="%(message)s", level=logging.ERROR)
    logging.getLogger(LOGGER_NAME).setLevel(logging.DEBUG)


def debug(msg: Union[str, Exception]) -> None:
    log(msg, DEBUG)


def info(msg: Union[str, Exception]) -> None:
    log(msg, INFO)


def warn(msg: Union[str, Exception]) -> None:
    log(msg, WARNING)


def error(msg: Union[str, Exception]) -> None:
    log(msg, ERROR)


def log(msg: Union[str, Exception], severity: int) -> None:
    """
    Write a timestamped message to the log file and print it when severe enough. An error severity message then
    raises: the exception itself when one is given, `LogError` otherwise.

    Args:
        msg (str or Exception): the message.
        severity (int): one of `DEBUG`, `INFO`, `WARNING` or `ERROR`.
    """
    line = f"{datetime.now().strftime('%d/%m/%y %H:%M:%S.%f')}:{SEVERITY_NAMES[severity]}: {msg}"
    _append(line)
    if severity >= _minimum_print_severity:
        logging.getLogger(LOGGER_NAME).log(severity, line)
    if severity < CRASH_ON:
        return
    if isinstance(msg, Exception):
        _append(traceback.format_exc())
        raise msg
    raise LogError(line)


def error_catch(function: Callable, *args, **kwargs) -> Any:
    """
    Call `function(*args, **kwargs)`. Any exception it raises is logged as an error, traceback included, then raised
    again.
    """
    try:
        return function(*args, **kwargs)
    except Exception as e:
        error(e)
        raise


def log_package_versions(severity: int = DEBUG) -> None:
    """
    Log the Python version and the installed version of each of `LOGGED_PACKAGES`.
    """
    log(f"Python=={sys.version.split()[0]}", severity)
    for name in LOGGED_PACKAGES:
        try:
            version = metadata.version(name)
        except metadata.PackageNotFoundError:
            version = "not installed"
        log(f"{name}=={version}", severity)


def _append(line: str) -> None:
    if _log_file_path is None:
        return
    with open(_log_file_path, "a") as file:
        file.write(line + "\n")


class LogError(Exception):
    pass


set_log_config()
