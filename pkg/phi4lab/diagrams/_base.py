from abc import ABC, abstractmethod
from typing import Callable, Optional

import numpy as np


class IDiagramEvaluator(ABC):
    """Evaluates I_G for a graph on a fixed lattice"""

    @abstractmethod
    def evaluate(self, graph, configurations: Optional[np.ndarray] = None):
        pass


class IOracle(ABC):
    """A source of exact expectations under the lattice Gibbs measure"""

    @abstractmethod
    def expectation(self, func: Callable[[np.ndarray], np.ndarray]):
        pass
