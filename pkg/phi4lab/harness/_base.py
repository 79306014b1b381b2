from abc import ABC, abstractmethod


class IReportWriter(ABC):
    """Persists an experiment report"""

    @abstractmethod
    def write(self, report) -> list:
        pass


class IPowerLawFitter(ABC):
    @abstractmethod
    def fit(self, lambdas, values, errors=None):
        pass
