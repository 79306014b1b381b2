from abc import ABC, abstractmethod


class IBlockDecomposition(ABC):
    """Splits a lattice field into frequency-localised pieces that sum back to the field"""

    @abstractmethod
    def blocks(self, values):
        pass
