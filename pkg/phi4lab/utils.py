import functools
import logging
import os
import time

from phi4lab.config import GlobalConfig


def set_global_loggers_to_warning():
    """
    Sets the level of all global loggers to Warning and installs the package log format.
    With PHI4LAB_LOG naming a file, the full debug log goes there; otherwise only warnings
    and errors reach stderr.
    """
    loggers = [logging.getLogger(name) for name in logging.root.manager.loggerDict]
    for logger in loggers:
        logger.setLevel(logging.WARNING)

    log_file = os.environ.get("PHI4LAB_LOG")
    if log_file:
        handler = logging.FileHandler(log_file)
        handler.setLevel(logging.DEBUG)
    else:
        handler = logging.StreamHandler()
        handler.setLevel(logging.WARNING)
    FORMAT = "[(%(asctime)s):%(filename)s:%(lineno)s:%(funcName)s()] %(message)s"
    logging.basicConfig(
        level=logging.DEBUG,
        format=FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[handler],
    )


def log_decorator(func):
    @functools.wraps(func)
    def wrapper_with_logs(*args, **kwargs):
        logger = logging.getLogger(func.__module__)
        logger.debug(f"Starting {func.__name__}")
        start = time.perf_counter()
        return_val = func(*args, **kwargs)
        logger.debug(f"Finished {func.__name__} in {time.perf_counter() - start:.3f}s")
        return return_val

    return wrapper_with_logs


class CacheManager:
    """Owns the local cache directory (Green kernels, checkpoints of long runs)."""

    def __init__(self, cache_path: str = None):
        self.cache_path = cache_path or GlobalConfig.get_local_cache_dir()

    def ensure_exists(self) -> str:
        os.makedirs(self.cache_path, exist_ok=True)
        return self.cache_path

    def clean_cache(self, max_age_days: int = 60):
        """
        Removes any files in the cache folder that are older than max_age_days.
        """
        if not os.path.isdir(self.cache_path):
            return
        cached_files = list(filter(self._is_cache_file, os.listdir(self.cache_path)))
        files_flagged_old = [f for f in cached_files if self._is_old_file(f, max_age_days)]
        list(map(self._remove_file, files_flagged_old))

    def _is_cache_file(self, path: str) -> bool:
        """
        Returns True if the specified path is a file in the cache directory, False otherwise.
        """
        return os.path.isfile(os.path.join(self.cache_path, path))

    def _is_old_file(self, file_name: str, max_age_days: int) -> bool:
        """
        Returns True if the specified file is older than max_age_days, False otherwise.
        """
        file_path = os.path.join(self.cache_path, file_name)
        return (time.time() - os.stat(file_path).st_mtime) // (24 * 3600) >= max_age_days

    def _remove_file(self, file_name: str):
        os.remove(os.path.join(self.cache_path, file_name))
