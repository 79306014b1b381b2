from dataclasses import dataclass, replace
from functools import cached_property
import logging
import os
from typing import List, Optional, Tuple

from phi4lab.config import RunConfig
from phi4lab.lattice import GreenCache, TorusLattice
from phi4lab.simulation import SimConfig
from phi4lab.utils import CacheManager

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

KINDS = ("toy", "expand", "oracle", "simulate", "asymptoticity", "two_point", "four_point")
ZERO_COUPLING_KINDS = ("toy", "simulate")
GRID_KEYS = {
    "oracle": "oracle_lambdas",
    "asymptoticity": "asymptoticity_lambdas",
    "two_point": "two_point_lambdas",
    "four_point": "four_point_lambdas",
}
SIDE_LENGTH_KEYS = {
    "oracle": "oracle_side_length",
    "asymptoticity": "asymptoticity_side_length",
    "two_point": "two_point_side_length",
    "four_point": "four_point_side_length",
}


class ExperimentError(Exception):
    """
    Raised for an experiment that cannot be set up or run as specified
    """

    def __init__(self, kind: str = "experiment", message: str = "invalid experiment"):
        self.kind = kind
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.kind, self.message)


class ToleranceFailure(Exception):
    """
    Raised when a report carries failed checks; maps to exit status 1
    """

    def __init__(self, report_name: str, failures: List[str]):
        self.report_name = report_name
        self.failures = list(failures)
        super().__init__(f"{len(self.failures)} failed checks")

    def __str__(self) -> str:
        return "{}: {}".format(self.report_name, "; ".join(self.failures))


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one experiment needs, resolved from a RunConfig.

    Example Use Case:
    ```python
    from phi4lab.config import RunConfig
    from phi4lab.harness import ExperimentSpec, run_experiment

    spec = ExperimentSpec.from_run_config("two_point", RunConfig("two_point.yml"), output_dir="out")
    report = run_experiment(spec)
    ```
    """

    kind: str
    side_length: float = 8.0
    spacing: float = 1.0
    mass: float = 1.0
    lambda_grid: Tuple[float, ...] = ()
    order: int = 2
    k: int = 2
    sim: Optional[SimConfig] = None
    output_dir: str = "."
    dot_dir: Optional[str] = None
    checkpoint_path: Optional[str] = None
    n_chains: int = 1
    n_processes: int = 1
    gamma: float = 0.5
    slope_band: float = 0.3
    noise_sigmas: float = 3.0
    identity_tolerance: float = 1e-6
    pointwise_coupling: float = 0.1
    ratio_band: float = 1.5
    toy_terms: int = 100
    green_cache_dir: Optional[str] = None
    expansion_file: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExperimentError(self.kind, f"unknown experiment kind, use one of {KINDS}")
        grid = tuple(float(value) for value in self.lambda_grid)
        object.__setattr__(self, "lambda_grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ExperimentError(self.kind, f"lambda grid {grid} is not strictly increasing")
        zero_allowed = self.kind in ZERO_COUPLING_KINDS
        if any(value < 0 or (value == 0 and not zero_allowed) for value in grid):
            raise ExperimentError(self.kind, f"lambda grid {grid} must be positive")
        if self.order < 0 or self.k < 1:
            raise ExperimentError(self.kind, "order >= 0 and k >= 1 required")

    @cached_property
    def lattice(self) -> TorusLattice:
        """The experiment lattice; its Green kernel comes from the disk cache when `green_cache_dir` is set"""
        lattice = TorusLattice(self.side_length, self.spacing, self.mass)
        if self.green_cache_dir is None:
            return lattice
        return GreenCache(self.green_cache_dir).attach(lattice)

    def sim_for(self, coupling: float) -> SimConfig:
        """The chain configuration on this spec's lattice at one coupling"""
        if self.sim is None:
            raise ExperimentError(self.kind, "no simulation parameters given")
        return replace(self.sim, lattice=self.lattice, coupling=float(coupling))

    def path(self, file_name: str) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        return os.path.join(self.output_dir, file_name)

    @classmethod
    def from_run_config(
        cls,
        kind: str,
        run_config: RunConfig,
        output_dir: str = ".",
        dot_dir: Optional[str] = None,
        checkpoint_path: Optional[str] = None,
        expansion_file: Optional[str] = None,
    ) -> "ExperimentSpec":
        """Resolve an experiment from the flat run configuration.

        The lattice side is taken from `<kind>_side_length` when the configuration has one, the
        coupling grid from `<kind>_lambdas`; toy and simulate runs use their single coupling.
        """
        if kind not in KINDS:
            raise ExperimentError(kind, f"unknown experiment kind, use one of {KINDS}")
        config = run_config.read()
        if kind == "toy":
            grid = [config["toy_coupling"]]
        elif kind in GRID_KEYS:
            grid = config[GRID_KEYS[kind]]
        else:
            grid = [config["coupling"]]
        side_length = config.get(SIDE_LENGTH_KEYS.get(kind, "side_length"), config["side_length"])
        spacing = config["oracle_spacing"] if kind == "oracle" else config["spacing"]
        band_key = "ratio_band_four_point" if kind == "four_point" else "ratio_band_two_point"
        spec = cls(
            kind=kind,
            side_length=side_length,
            spacing=spacing,
            mass=config["mass"],
            lambda_grid=tuple(grid),
            order=config["order"],
            k=config["k"],
            sim=SimConfig.from_run_config(run_config),
            output_dir=output_dir,
            dot_dir=dot_dir,
            checkpoint_path=checkpoint_path,
            expansion_file=expansion_file,
            n_chains=config["n_chains"],
            n_processes=config["n_processes"],
            gamma=config["gamma"],
            slope_band=config["slope_band"],
            noise_sigmas=config["noise_sigmas"],
            identity_tolerance=config["identity_tolerance"],
            pointwise_coupling=config["pointwise_coupling"],
            ratio_band=config[band_key],
            toy_terms=config["toy_terms"],
            green_cache_dir=CacheManager().cache_path if config["use_green_cache"] else None,
        )
        logger.debug(f"{kind}: M={spec.side_length} eps={spec.spacing} m={spec.mass} lambdas={spec.lambda_grid}")
        return spec
