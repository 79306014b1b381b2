from abc import ABC, abstractmethod
import yaml
from typing import Any, List, Optional


class IConfig(ABC):
    def load_from_path(self, path) -> dict:
        with open(path, "r") as ymlfile:
            return yaml.safe_load(ymlfile) or {}

    @classmethod
    def get_value_from_config(cls, keys: List[str]) -> Optional[Any]:
        """Get a specific value from the config file.
        Example:
            >>> GlobalConfig.get_value_from_config(["simulation", "dt"])
        """
        instance = cls()
        config = instance.read()
        for key in keys:
            config = config[key]
        return config

    @abstractmethod
    def read(self) -> dict:
        pass


class IGlobalConfig(IConfig):
    pass


class IRunConfig(IConfig):
    @abstractmethod
    def get(self, key: str, default: Any = None) -> Any:
        pass
