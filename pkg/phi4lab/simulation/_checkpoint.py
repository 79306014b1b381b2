import json
import logging
import os
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ._base import IChainCheckpoint
from ._state import ChainState
from phi4lab.lattice import LatticeField, TorusLattice

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

HEADER = struct.Struct("<dddQQ")


class CheckpointError(Exception):
    """
    Raised when a checkpoint file is truncated or does not match its header
    """

    def __init__(self, path: str, message: str = "corrupt checkpoint"):
        self.path = path
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.path, self.message)


class BinaryCheckpoint(IChainCheckpoint):
    """Little-endian binary checkpoint of a chain.

    Layout: header (M, eps, m as float64; n and step_count as uint64), the n*n field values as
    float64 in row-major order, then the byte length (uint64) and JSON text of the generator state.

    Example Use Case:
    ```python
    from phi4lab.simulation import BinaryCheckpoint

    checkpoint = BinaryCheckpoint()
    checkpoint.save(state, "chain.ckpt")
    resumed = checkpoint.load("chain.ckpt")
    ```
    """

    def save(self, state: ChainState, path: Union[str, Path]) -> None:
        lattice = state.phi.lattice
        rng_state = json.dumps(state.rng_state).encode("utf-8")
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "wb") as checkpoint_file:
            checkpoint_file.write(
                HEADER.pack(lattice.side_length, lattice.spacing, lattice.mass, lattice.n, state.step_count)
            )
            checkpoint_file.write(np.ascontiguousarray(state.phi.values, dtype="<f8").tobytes())
            checkpoint_file.write(struct.pack("<Q", len(rng_state)))
            checkpoint_file.write(rng_state)
        logger.debug(f"saved checkpoint at step {state.step_count} to {path}")

    def load(self, path: Union[str, Path]) -> ChainState:
        with open(path, "rb") as checkpoint_file:
            payload = checkpoint_file.read()
        if len(payload) < HEADER.size:
            raise CheckpointError(str(path), "truncated header")
        side_length, spacing, mass, n, step_count = HEADER.unpack_from(payload)
        lattice = TorusLattice(side_length, spacing, mass)
        if lattice.n != n:
            raise CheckpointError(str(path), f"header n={n} does not match M/eps={lattice.n}")
        offset = HEADER.size
        field_bytes = 8 * n * n
        if len(payload) < offset + field_bytes + 8:
            raise CheckpointError(str(path), "truncated field")
        values = np.frombuffer(payload, dtype="<f8", count=n * n, offset=offset).reshape(n, n).copy()
        offset += field_bytes
        (state_length,) = struct.unpack_from("<Q", payload, offset)
        offset += 8
        if len(payload) != offset + state_length:
            raise CheckpointError(str(path), "generator state length mismatch")
        rng_state = json.loads(payload[offset:].decode("utf-8"))
        bit_generator = getattr(np.random, rng_state["bit_generator"])()
        bit_generator.state = rng_state
        return ChainState(LatticeField(values, lattice), int(step_count), np.random.Generator(bit_generator))


def save_checkpoint(state: ChainState, path: Union[str, Path]) -> None:
    BinaryCheckpoint().save(state, path)


def load_checkpoint(path: Union[str, Path]) -> ChainState:
    return BinaryCheckpoint().load(path)
