from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union


class IKernelCache(ABC):
    @abstractmethod
    def load_or_compute(self, lattice):
        pass

    @abstractmethod
    def write(self, lattice, kernel, path: Union[str, Path]) -> None:
        pass

    @abstractmethod
    def read(self, path: Union[str, Path]):
        pass
