from abc import ABC, abstractmethod


class IChainCheckpoint(ABC):
    """Persists a chain state so a run can be resumed"""

    @abstractmethod
    def save(self, state, path) -> None:
        pass

    @abstractmethod
    def load(self, path):
        pass


class IObservableSet(ABC):
    """Accumulates per-sample observables into batches"""

    @abstractmethod
    def add(self, phi) -> None:
        pass

    @abstractmethod
    def to_frame(self):
        pass
