from abc import ABC, abstractmethod
from typing import List


class IVertexSelector(ABC):
    """Chooses the vertex x at which the next integration by parts is applied"""

    @abstractmethod
    def select(self, graph) -> int:
        pass


class IExpansionWriter(ABC):
    @abstractmethod
    def write(self, expansion, path) -> None:
        pass

    @abstractmethod
    def read(self, path):
        pass


class IGraphExporter(ABC):
    @abstractmethod
    def export(self, graph) -> str:
        pass

    def export_all(self, graphs: List) -> List[str]:
        return [self.export(graph) for graph in graphs]
