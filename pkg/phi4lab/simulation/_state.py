from dataclasses import dataclass

import numpy as np

from phi4lab.lattice import LatticeField


class DivergenceError(Exception):
    """
    Raised when the field picks up a NaN or infinite value
    """

    def __init__(self, step_count: int, message: str = "non-finite field"):
        self.step_count = step_count
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "step {}: {}".format(self.step_count, self.message)


@dataclass
class ChainState:
    """Field, step counter and the generator that drives the noise"""

    phi: LatticeField
    step_count: int
    rng: np.random.Generator

    @property
    def rng_state(self) -> dict:
        return self.rng.bit_generator.state

    def check_finite(self):
        if not np.all(np.isfinite(self.phi.values)):
            raise DivergenceError(self.step_count)
