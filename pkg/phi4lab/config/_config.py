import os
import logging
from pathlib import Path
from typing import Any, Optional, Union

from ._base import IGlobalConfig, IRunConfig

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

SECTIONS = ("lattice", "simulation", "expansion", "diagrams", "quadrature", "besov", "harness")


class GlobalConfig(IGlobalConfig):
    """Class to manage the packaged defaults. These cannot be edited by the user and hold the
    desk-scale parameters every experiment starts from.
    Example:
        >>> global_config = GlobalConfig()
        >>> global_config.read()["simulation"]["dt"]
        0.05
    """

    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "global_config.yml")

    def read(self) -> dict:
        global_config = self.load_from_path(self.path)
        return global_config

    def flat(self) -> dict:
        """Flatten the sectioned defaults into a single mapping of leaf keys"""
        config = self.read()
        flat = {"local_cache_dir": config.get("local_cache_dir", ".phi4_cache")}
        for section in SECTIONS:
            flat.update(config.get(section, {}) or {})
        return flat

    @staticmethod
    def get_local_cache_dir() -> str:
        return os.path.join(Path.home(), GlobalConfig().read()["local_cache_dir"])


class RunConfig(IRunConfig):
    """A run configuration: the flat `key: value` YAML file a user passes with `--config`,
    overlaid on the packaged defaults.

    Example:
    ```python
    from phi4lab.config import RunConfig

    config = RunConfig("sim.yml", overrides={"seed": 7})
    config.get("dt")
    ```
    """

    def __init__(self, path: Optional[Union[str, Path]] = None, overrides: Optional[dict] = None):
        """Instantiate a RunConfig

        Args:
            path (str, optional): YAML file with a flat mapping. Defaults to None (packaged defaults only).
            overrides (dict, optional): values that win over both the file and the defaults (CLI flags).

        Raises:
            FileNotFoundError: Raised if path is given and does not exist
            ValueError: Raised if the file is not a flat mapping
        """
        self.path = path
        self.overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        if path is not None and not os.path.exists(path):
            raise FileNotFoundError(f"Run config {path} does not exist")

    def read(self) -> dict:
        config = GlobalConfig().flat()
        if self.path is not None:
            user_config = self.load_from_path(self.path)
            if not isinstance(user_config, dict):
                raise ValueError(f"Run config {self.path} must be a key: value mapping")
            nested = [key for key, value in user_config.items() if isinstance(value, dict)]
            if nested:
                raise ValueError(f"Run config {self.path} must be flat, found sections {nested}")
            unknown = set(user_config) - set(config)
            if unknown:
                logger.warning(f"Unknown keys in run config {self.path}: {sorted(unknown)}")
            config.update(user_config)
        config.update(self.overrides)
        return config

    def get(self, key: str, default: Any = None) -> Any:
        return self.read().get(key, default)
