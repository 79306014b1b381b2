"""
Module for Langevin sampling of the lattice Phi^4 measure.

### Types
- SimConfig: lattice, coupling, step size, chain lengths and seed of one chain
- ChainState: field, step counter and generator
- MeasurementSet: batched observables of a chain (S^2, S^4 and site moments)
- BinaryCheckpoint: binary save and load of a chain state

### Operations
- step: one exponential Euler step of the Wick-renormalised Langevin equation
- run_chain / run_chains: burn-in, thinned measurements, independent chains merged in seed order
- sample_free_field: exact draw of the Gaussian free field
- connected_4pt: connected four-point function with jackknife errors
"""
from ._state import ChainState, DivergenceError
from ._checkpoint import BinaryCheckpoint, CheckpointError, load_checkpoint, save_checkpoint
from ._measurements import MeasurementSet, connected_4pt, merge_measurements
from ._langevin import (
    ExponentialEuler,
    SimConfig,
    chain_seeds,
    drift,
    initial_state,
    noise_variance,
    run_chain,
    run_chains,
    sample_free_field,
    stationary_variance,
    step,
)


__all__ = [
    ChainState,
    DivergenceError,
    BinaryCheckpoint,
    CheckpointError,
    load_checkpoint,
    save_checkpoint,
    MeasurementSet,
    connected_4pt,
    merge_measurements,
    ExponentialEuler,
    SimConfig,
    chain_seeds,
    drift,
    initial_state,
    noise_variance,
    run_chain,
    run_chains,
    sample_free_field,
    stationary_variance,
    step,
]
