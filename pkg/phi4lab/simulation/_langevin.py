from dataclasses import dataclass, replace
from functools import lru_cache, partial
import logging
import multiprocessing as mp
from typing import List, Optional

import numpy as np

from phi4lab.config import RunConfig
from phi4lab.diagrams import default_configurations
from phi4lab.lattice import LatticeField, TorusLattice, wick_constant
from phi4lab.utils import log_decorator
from ._checkpoint import save_checkpoint
from ._measurements import MeasurementSet, merge_measurements
from ._state import ChainState

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one Langevin chain.

    Example Use Case:
    ```python
    from phi4lab.lattice import TorusLattice
    from phi4lab.simulation import SimConfig, run_chain

    cfg = SimConfig(TorusLattice(8.0, 1.0, 1.0), coupling=0.1, dt=0.05, burn_in=2000, n_samples=4000, thinning=5, seed=1)
    measurements = run_chain(cfg)
    ```
    """

    lattice: TorusLattice
    coupling: float
    dt: float
    burn_in: int
    n_samples: int
    thinning: int
    seed: int
    n_batches: int = 16
    four_point_stride: int = 1
    four_point_max_separation: int = 2

    def __post_init__(self):
        if self.coupling < 0:
            raise ValueError(f"coupling must be nonnegative, got {self.coupling}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.burn_in < 0 or self.n_samples < 1 or self.thinning < 1 or self.n_batches < 1:
            raise ValueError("burn_in >= 0, n_samples >= 1, thinning >= 1 and n_batches >= 1 required")
        if self.stiffness > 10:
            logger.debug(f"dt * (m + max l_eps) = {self.stiffness:.3g}: stiff linear part, integrated exactly")

    @property
    def stiffness(self) -> float:
        return self.dt * self.lattice.stiffness

    @property
    def configurations(self) -> np.ndarray:
        return default_configurations(self.lattice, self.four_point_stride, self.four_point_max_separation)

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=int(seed))

    @classmethod
    def from_run_config(cls, run_config: RunConfig) -> "SimConfig":
        config = run_config.read()
        lattice = TorusLattice(config["side_length"], config["spacing"], config["mass"])
        return cls(
            lattice=lattice,
            coupling=config["coupling"],
            dt=config["dt"],
            burn_in=config["burn_in"],
            n_samples=config["n_samples"],
            thinning=config["thinning"],
            seed=config["seed"],
            n_batches=config["n_batches"],
            four_point_stride=config["four_point_stride"],
            four_point_max_separation=config["four_point_max_separation"],
        )


def sample_free_field(lattice: TorusLattice, rng: np.random.Generator) -> LatticeField:
    """Exact draw of the free field with covariance C: site white noise filtered by sqrt(1/(2 mu)) per mode"""
    white = rng.standard_normal(lattice.shape)
    filtered = np.fft.ifft2(np.fft.fft2(white) * np.sqrt(0.5 / lattice.multiplier.values))
    return LatticeField(np.real(filtered) / lattice.spacing, lattice)


def noise_variance(mu: np.ndarray, dt: float, spacing: float = 1.0) -> np.ndarray:
    """Per-mode variance injected in one step: eps^-2 (1 - exp(-2 mu dt)) / (2 mu)"""
    return -np.expm1(-2.0 * mu * dt) / (2.0 * mu) / spacing**2


def stationary_variance(mu: np.ndarray, dt: float, spacing: float = 1.0) -> np.ndarray:
    """Fixed point of v -> exp(-2 mu dt) v + noise_variance, equal to eps^-2 / (2 mu) for every dt"""
    return noise_variance(mu, dt, spacing) / -np.expm1(-2.0 * mu * dt)


class ExponentialEuler:
    """Per-mode coefficients of the exponential Euler step for one (lattice, dt)"""

    def __init__(self, lattice: TorusLattice, dt: float):
        mu = lattice.multiplier.values
        self.lattice = lattice
        self.decay = np.exp(-mu * dt)
        self.drift = -np.expm1(-mu * dt) / mu
        self.noise = np.sqrt(noise_variance(mu, dt, lattice.spacing))

    def advance(self, phi: np.ndarray, nonlinear: np.ndarray, noise: np.ndarray) -> np.ndarray:
        mode = self.decay * np.fft.fft2(phi) + self.drift * np.fft.fft2(nonlinear) + self.noise * np.fft.fft2(noise)
        return np.real(np.fft.ifft2(mode))


@lru_cache(maxsize=16)
def _integrator(lattice: TorusLattice, dt: float) -> ExponentialEuler:
    return ExponentialEuler(lattice, dt)


def drift(phi: np.ndarray, coupling: float, a: float) -> np.ndarray:
    """Nonlinear drift -(lambda/2) Phi^3 + (3/2) lambda a Phi"""
    return -0.5 * coupling * phi**3 + 1.5 * coupling * a * phi


def step(state: ChainState, cfg: SimConfig, noise: Optional[np.ndarray] = None) -> ChainState:
    """One exponential Euler step of d Phi = -[(m - Delta) Phi + lambda/2 :Phi^3:] dt + eps^-1 dW.

    The linear part is solved exactly per Fourier mode and the noise carries the exact
    Ornstein-Uhlenbeck increment, so at lambda = 0 the stationary law is the free field for any dt.

    Args:
        state (ChainState): current state on cfg.lattice
        cfg (SimConfig): chain parameters
        noise (np.ndarray, optional): (n, n) standard normal site noise. Defaults to a draw from state.rng.

    Raises:
        DivergenceError: Raised if the new field is not finite

    Returns:
        ChainState: the advanced state (shares the generator)
    """
    lattice = cfg.lattice
    if noise is None:
        noise = state.rng.standard_normal(lattice.shape)
    phi = state.phi.values
    nonlinear = drift(phi, cfg.coupling, wick_constant(lattice)) if cfg.coupling else np.zeros_like(phi)
    advanced = _integrator(lattice, cfg.dt).advance(phi, nonlinear, noise)
    new_state = ChainState(LatticeField(advanced, lattice), state.step_count + 1, state.rng)
    new_state.check_finite()
    return new_state


def initial_state(cfg: SimConfig) -> ChainState:
    rng = np.random.default_rng(cfg.seed)
    return ChainState(sample_free_field(cfg.lattice, rng), 0, rng)


@log_decorator
def run_chain(cfg: SimConfig, initial: Optional[ChainState] = None, checkpoint_path: Optional[str] = None):
    """Burn in, then record n_samples measurements spaced by `thinning` steps.

    Args:
        cfg (SimConfig): chain parameters; the seed fixes every draw
        initial (ChainState, optional): state to resume from; burn-in is skipped. Defaults to a
            free-field draw followed by burn-in.
        checkpoint_path (str, optional): where to save the final state

    Returns:
        MeasurementSet: batched observables of the chain
    """
    if initial is None:
        state = initial_state(cfg)
        for _ in range(cfg.burn_in):
            state = step(state, cfg)
    else:
        state = initial
    measurements = MeasurementSet(cfg.lattice, cfg.coupling, cfg.n_samples, cfg.n_batches, cfg.configurations)
    for _ in range(cfg.n_samples):
        for _ in range(cfg.thinning):
            state = step(state, cfg)
        measurements.add(state.phi)
    logger.debug(
        f"chain M={cfg.lattice.side_length} eps={cfg.lattice.spacing} lambda={cfg.coupling} seed={cfg.seed}: "
        f"{state.step_count} steps, {cfg.n_samples} samples"
    )
    if checkpoint_path is not None:
        save_checkpoint(state, checkpoint_path)
    return measurements


def chain_seeds(seed: int, n_chains: int) -> List[int]:
    """Independent child seeds derived with numpy SeedSequence.spawn"""
    children = np.random.SeedSequence(seed).spawn(n_chains)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def _run_with_seed(seed: int, cfg: SimConfig):
    return run_chain(cfg.with_seed(seed))


@log_decorator
def run_chains(cfg: SimConfig, n_chains: int = 1, n_processes: int = 1):
    """Independent chains with derived seeds, merged in seed order"""
    if n_chains == 1:
        return run_chain(cfg)
    worker = partial(_run_with_seed, cfg=cfg)
    seeds = chain_seeds(cfg.seed, n_chains)
    if n_processes > 1:
        with mp.Pool(processes=n_processes) as working_computation_pool:
            results = working_computation_pool.map(worker, seeds)
    else:
        results = list(map(worker, seeds))
    return merge_measurements(results)
