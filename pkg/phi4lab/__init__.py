"""
# Objective
phi4lab is a python package for checking perturbation theory of the two-dimensional lattice Phi^4 model
numerically: the symbolic integration-by-parts expansion of the correlation functions, the values of the
resulting diagrams, exact expectations on tiny lattices, Langevin sampling on larger ones and the discrete
Besov norms in which the short-distance statements are made.

# Purpose
To have one place where the expansion, the diagram values and the Monte Carlo data are produced with
the same conventions, so that every coefficient can be cross-checked against an independent number.

# Modules

- config: packaged defaults (GlobalConfig) and the flat user run configuration (RunConfig)
- lattice: the periodic lattice, discrete Laplacian, Green function, Wick constant and FFT convolution
- graphs: coloured multigraphs, the integration-by-parts rewrite and the expansion to order N
- diagrams: diagram integrals, the quadrature oracle and the identity battery
- simulation: exponential Euler Langevin chains, batched measurements and checkpoints
- besov: Littlewood-Paley blocks and weighted Besov/Holder norms
- harness: the experiments, their reports and the `phi4` command line
- utils: logging setup, log_decorator and the cache manager

# Installation Guide

Clone the repository, activate the virtual env of interest and install the package:
```bash
git clone <repository url> phi4lab
cd phi4lab
pip install -e .
```

## Config Setup

There are two config layers:
1. Global Config - the packaged defaults in `phi4lab/config/global_config.yml`. These change only with a PR.
2. Run Config - a flat `key: value` YAML file passed with `--config` (or to `RunConfig`), overlaid on
   the defaults. Command line flags win over both.

```python
from phi4lab.config import RunConfig
from phi4lab.simulation import SimConfig, run_chain

cfg = SimConfig.from_run_config(RunConfig("sim.yml", overrides={"seed": 7}))
measurements = run_chain(cfg)
```
"""

from phi4lab.utils import set_global_loggers_to_warning


set_global_loggers_to_warning()
