import logging
import os
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ._fits import PowerLawFit, fit_power_law, jackknife
from ._reports import PlotSpec, Report
from ._spec import ExperimentError, ExperimentSpec
from ._toy import run_toy
from phi4lab.besov import DyadicPartition, besov_norm
from phi4lab.config import GlobalConfig
from phi4lab.diagrams import (
    DiagramBudgetError,
    QuadratureOracle,
    default_configurations,
    eval_pure,
    evaluate_terms,
    identity_battery,
    term_values_frame,
)
from phi4lab.graphs import DotExporter, Expansion, canonicalize, expand, is_connected, write_expansion
from phi4lab.lattice import LatticeField, TorusLattice
from phi4lab.simulation import MeasurementSet, connected_4pt, run_chain, run_chains
from phi4lab.utils import log_decorator

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

WEIGHT_NOTE = "torus norms use rho = 1, so the weight exponent l does not enter"


def separation_configurations(lattice: TorusLattice) -> np.ndarray:
    """(x_1, x_2) = (0, r) for every separation r, in row-major order"""
    n = lattice.n
    return np.asarray([[(0, 0), (i, j)] for i in range(n) for j in range(n)], dtype=int)


def coupling_coefficients(expansion: Expansion, lattice: TorusLattice, configurations: np.ndarray, connected: bool = False) -> Dict[int, np.ndarray]:
    """sum r'_G I_G per order n on the configurations, the coefficient of lambda^n"""
    coefficients = {}
    for n in range(expansion.N + 1):
        terms = expansion.connected_terms(n) if connected else expansion.lambda_coefficient(n)
        value = evaluate_terms(terms, lambda graph: eval_pure(graph, lattice, configurations))
        coefficients[n] = np.broadcast_to(value.values, (len(configurations),)).astype(float)
    return coefficients


def diagram_table(expansion: Expansion, lattice: TorusLattice, configurations: np.ndarray, connected: bool = False) -> pd.DataFrame:
    """Bare values I_G of every order-n term on the configurations, graph ids F<n>_<index in F_n>"""
    terms, graph_ids = [], []
    for n in range(expansion.N + 1):
        for index, term in enumerate(expansion.f_terms[n]):
            if connected and not is_connected(term.graph):
                continue
            terms.append(term)
            graph_ids.append(f"F{n}_{index}")
    return term_values_frame(terms, lambda graph: eval_pure(graph, lattice, configurations), configurations, graph_ids)


def expansion_configurations(lattice: TorusLattice, k: int) -> np.ndarray:
    """Every separation for k = 2, the default four-point set for k = 4, coincident points otherwise"""
    if k == 2:
        return separation_configurations(lattice)
    if k == 4:
        return default_configurations(lattice)
    return np.zeros((1, k, 2), dtype=int)


def series_value(coefficients: Dict[int, np.ndarray], coupling: float, lowest: int = 0) -> np.ndarray:
    return sum(coupling**n * values for n, values in coefficients.items() if n >= lowest)


def _ratio_spread(values: Sequence[float]) -> float:
    values = np.abs(np.asarray(values, dtype=float))
    return float(values.max() / values.min()) if len(values) and values.min() > 0 else float("inf")


def _fit_or_none(lambdas, values, errors) -> Optional[PowerLawFit]:
    if len(lambdas) < 2:
        return None
    return fit_power_law(lambdas, values, errors)


def _measure(spec: ExperimentSpec, coupling: float) -> MeasurementSet:
    measurements = run_chains(spec.sim_for(coupling), spec.n_chains, spec.n_processes)
    logger.debug(f"{spec.kind} lambda={coupling}: {measurements.n_added} samples in {measurements.n_batches} batches")
    return measurements


def _closest(grid: Sequence[float], target: float) -> float:
    return min(grid, key=lambda value: abs(value - target))


@log_decorator
def run_expand(spec: ExperimentSpec) -> Report:
    """Expand the k-point function to order N; writes the text file, the per-term diagram values and, when asked, DOT files"""
    expansion = expand(spec.k, spec.order)
    rows = []
    sections = [(f"F{n}", expansion.f_terms[n]) for n in range(expansion.N + 1)] + [("R", expansion.remainder_terms)]
    exporter = DotExporter()
    if spec.dot_dir is not None:
        os.makedirs(spec.dot_dir, exist_ok=True)
    for section, terms in sections:
        for index, term in enumerate(terms):
            rows.append(
                {
                    "section": section,
                    "index": index,
                    "lambda_power": term.lambda_power,
                    "coeff": str(term.coeff),
                    "interior_vertices": term.graph.interior_count,
                    "edges": len(term.graph.edges),
                    "connected": is_connected(term.graph),
                    "key": canonicalize(term.graph),
                }
            )
            if spec.dot_dir is not None:
                exporter.name = f"{section}_{index}"
                with open(os.path.join(spec.dot_dir, f"{section}_{index}.dot"), "w") as dot_file:
                    dot_file.write(exporter.export(term.graph))
    name = f"expansion_k{spec.k}_N{spec.order}"
    if spec.expansion_file is not None:
        os.makedirs(os.path.dirname(spec.expansion_file) or ".", exist_ok=True)
    write_expansion(expansion, spec.expansion_file or spec.path(f"{name}.txt"))
    table = pd.DataFrame(rows, columns=["section", "index", "lambda_power", "coeff", "interior_vertices", "edges", "connected", "key"])
    summary = {"k": spec.k, "N": spec.order, "remainder_terms": len(expansion.remainder_terms)}
    summary.update({f"F{n}_terms": len(expansion.f_terms[n]) for n in range(expansion.N + 1)})
    tables, notes = {}, []
    try:
        lattice = spec.lattice
        tables[f"{name}_diagrams"] = diagram_table(expansion, lattice, expansion_configurations(lattice, spec.k))
    except DiagramBudgetError as e:
        logger.warning(f"Skipping the diagram table: {e}")
        notes.append(f"diagram table skipped: {e}")
    return Report(name, table, summary, notes=notes, tables=tables)


@log_decorator
def run_oracle_suite(spec: ExperimentSpec) -> Report:
    """Every IBP and expansion identity on the quadrature oracle, for each coupling of the grid"""
    rows, failures = [], []
    for coupling in spec.lambda_grid:
        oracle = QuadratureOracle(spec.lattice, coupling)
        for check in identity_battery(oracle, spec.identity_tolerance, orders=range(spec.order + 1)):
            rows.append(check.as_row())
            if not check.passed:
                failures.append(f"{check.name} at lambda={coupling}: residual {check.residual:.2e}")
    table = pd.DataFrame(rows, columns=["identity", "lambda", "lhs", "rhs", "residual", "tolerance", "passed"])
    summary = {"checks": len(table), "max_residual": float(table["residual"].max()) if len(table) else 0.0}
    return Report("oracle_suite", table, summary, failures)


def _oracle_two_point(lattice: TorusLattice, coupling: float):
    oracle = QuadratureOracle(lattice, coupling)
    return float(oracle.expectation(lambda fields: fields[:, 0, 0] ** 2)), 0.0


def _monte_carlo_two_point(spec: ExperimentSpec, coupling: float):
    two_point = _measure(spec, coupling).two_point()
    return float(two_point.values[0, 0]), float(two_point.stderr[0, 0])


@log_decorator
def run_asymptoticity(spec: ExperimentSpec) -> Report:
    """Remainder of the order-N series for the coincident two-point function, and its slope in lambda.

    S^2(x, x) comes from the quadrature oracle when the lattice is small enough, otherwise from the
    Langevin chains. Points whose remainder is within `noise_sigmas` standard errors of zero (or at
    roundoff for the oracle) are flagged and left out of the fit.
    """
    lattice = spec.lattice
    use_oracle = lattice.n_sites <= GlobalConfig.get_value_from_config(["quadrature", "max_sites"])
    coefficients = coupling_coefficients(expand(2, spec.order), lattice, np.zeros((1, 2, 2), dtype=int))
    rows = []
    for coupling in spec.lambda_grid:
        exact, stderr = _oracle_two_point(lattice, coupling) if use_oracle else _monte_carlo_two_point(spec, coupling)
        series = float(series_value(coefficients, coupling)[0])
        remainder = exact - series
        floor = spec.noise_sigmas * stderr if stderr > 0 else 1e-12 * abs(exact)
        rows.append(
            {
                "lambda": coupling,
                "two_point": exact,
                "stderr": stderr,
                "series": series,
                "remainder": remainder,
                "flagged": abs(remainder) <= floor,
            }
        )
    table = pd.DataFrame(rows)
    kept = table[~table["flagged"]]
    expected = 2 if spec.order <= 1 else spec.order + 1
    errors = None if use_oracle else kept["stderr"]
    fit = _fit_or_none(kept["lambda"], kept["remainder"], errors)
    failures = []
    if fit is None:
        failures.append(f"fewer than 2 points above the noise floor ({int(table['flagged'].sum())} flagged)")
    else:
        if fit.slope < expected - spec.slope_band:
            failures.append(f"slope {fit.slope:.3f} below {expected} - {spec.slope_band}")
        if spec.order <= 1 and fit.slope > expected + spec.slope_band:
            failures.append(f"slope {fit.slope:.3f} above {expected} + {spec.slope_band}")
    summary = {"N": spec.order, "backend": "oracle" if use_oracle else "monte_carlo", "expected_slope": expected}
    summary["flagged_points"] = int(table["flagged"].sum())
    if fit is not None:
        summary.update(fit.as_dict())
    plot = PlotSpec(x="lambda", y="remainder", yerr=None if use_oracle else "stderr", fit=fit)
    return Report(f"asymptoticity_N{spec.order}", table, summary, failures, plot)


@log_decorator
def run_two_point(spec: ExperimentSpec) -> Report:
    """Short-distance size of S^2 - C in C^(2 - gamma) across the coupling grid.

    The norm error is a jackknife over batches. The difference is also compared separation by
    separation with the series sum_(1 <= n <= N) lambda^n sum r'_G I_G.
    """
    lattice = spec.lattice
    green = lattice.green_kernel.values
    part = DyadicPartition(lattice)
    alpha = 2.0 - spec.gamma
    expansion = expand(2, spec.order)
    coefficients = coupling_coefficients(expansion, lattice, separation_configurations(lattice))

    def norm_of(mean_two_point):
        return besov_norm(LatticeField(mean_two_point - green, lattice), alpha, part=part)

    rows = []
    for coupling in spec.lambda_grid:
        two_point = _measure(spec, coupling).two_point()
        norm, norm_stderr = jackknife(two_point.batch_values, norm_of)
        difference = two_point.values - green
        prediction = series_value(coefficients, coupling, lowest=1).reshape(lattice.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            z_scores = np.where(two_point.stderr > 0, (difference - prediction) / two_point.stderr, 0.0)
        rows.append(
            {
                "lambda": coupling,
                "norm": norm,
                "norm_stderr": norm_stderr,
                "norm_over_lambda2": norm / coupling**2,
                "difference_r0": difference[0, 0],
                "stderr_r0": two_point.stderr[0, 0],
                "prediction_r0": prediction[0, 0],
                "z_r0": z_scores[0, 0],
                "coverage_3sigma": float(np.mean(np.abs(z_scores) <= 3.0)),
                "flagged": norm <= spec.noise_sigmas * norm_stderr,
            }
        )
    table = pd.DataFrame(rows)
    kept = table[~table["flagged"]]
    fit = _fit_or_none(kept["lambda"], kept["norm"], kept["norm_stderr"])
    spread = _ratio_spread(kept["norm_over_lambda2"])
    failures = []
    if len(kept) < 2:
        failures.append(f"fewer than 2 norms above the noise floor ({int(table['flagged'].sum())} flagged)")
    elif spread > spec.ratio_band:
        failures.append(f"norm / lambda^2 varies by {spread:.3f} > {spec.ratio_band}")
    pointwise = table[table["lambda"] == _closest(spec.lambda_grid, spec.pointwise_coupling)].iloc[0]
    if abs(pointwise["z_r0"]) > 3.0:
        failures.append(f"S^2 - C at r=0 is {pointwise['z_r0']:.2f} stderr from the series at lambda={pointwise['lambda']}")
    summary = {"alpha": alpha, "ratio_spread": spread, "pointwise_lambda": float(pointwise["lambda"])}
    if fit is not None:
        summary.update(fit.as_dict())
    plot = PlotSpec(x="lambda", y="norm", yerr="norm_stderr", fit=fit)
    diagrams = diagram_table(expansion, lattice, separation_configurations(lattice))
    return Report("two_point", table, summary, failures, plot, notes=[WEIGHT_NOTE], tables={"two_point_diagrams": diagrams})


@log_decorator
def run_four_point(spec: ExperimentSpec) -> Report:
    """Connected four-point function against its first-order term -6 lambda * star.

    The first-order coefficient is read off the connected lambda^1 part of the k = 4 expansion and
    evaluated on the same configurations the chains measure.
    """
    lattice = spec.lattice
    expansion = expand(4, 1)
    rows, configurations, first_order = [], None, None
    for coupling in spec.lambda_grid:
        measurements = _measure(spec, coupling)
        if first_order is None:
            configurations = measurements.configurations
            first_order = coupling_coefficients(expansion, lattice, configurations, connected=True)[1]
        connected = connected_4pt(measurements)
        corrected = connected.values - coupling * first_order
        for c in range(len(configurations)):
            stderr = connected.stderr[c]
            rows.append(
                {
                    "lambda": coupling,
                    "config_id": f"c{c}",
                    "u4": connected.values[c],
                    "u4_stderr": stderr,
                    "first_order": first_order[c],
                    "corrected": corrected[c],
                    "u4_over_lambda": connected.values[c] / coupling,
                    "corrected_over_lambda2": corrected[c] / coupling**2,
                    "u4_flagged": abs(connected.values[c]) <= spec.noise_sigmas * stderr,
                    "corrected_flagged": abs(corrected[c]) <= spec.noise_sigmas * stderr,
                }
            )
    table = pd.DataFrame(rows)
    coincident = table[table["config_id"] == "c0"]
    failures = []
    pointwise = coincident[coincident["lambda"] == _closest(spec.lambda_grid, spec.pointwise_coupling)].iloc[0]
    if pointwise["u4"] >= -3.0 * pointwise["u4_stderr"]:
        failures.append(f"U4 at the coincident configuration is not negative beyond 3 stderr at lambda={pointwise['lambda']}")
    u4_kept = coincident[~coincident["u4_flagged"]]
    corrected_kept = coincident[~coincident["corrected_flagged"]]
    u4_spread = _ratio_spread(u4_kept["u4_over_lambda"])
    corrected_spread = _ratio_spread(corrected_kept["corrected_over_lambda2"])
    if len(u4_kept) >= 2 and u4_spread > 1.5:
        failures.append(f"|U4| / lambda varies by {u4_spread:.3f} > 1.5")
    if len(corrected_kept) >= 2 and corrected_spread > spec.ratio_band:
        failures.append(f"|U4 + 6 lambda star| / lambda^2 varies by {corrected_spread:.3f} > {spec.ratio_band}")
    u4_fit = _fit_or_none(u4_kept["lambda"], u4_kept["u4"], u4_kept["u4_stderr"])
    corrected_fit = _fit_or_none(corrected_kept["lambda"], corrected_kept["corrected"], corrected_kept["u4_stderr"])
    summary = {"u4_ratio_spread": u4_spread, "corrected_ratio_spread": corrected_spread}
    if u4_fit is not None:
        summary.update(u4_fit.as_dict("u4_"))
    if corrected_fit is not None:
        summary.update(corrected_fit.as_dict("corrected_"))
    plot = PlotSpec(x="lambda", y="u4", yerr="u4_stderr", hue="config_id", fit=u4_fit)
    if configurations is None:
        configurations = default_configurations(lattice)
    diagrams = diagram_table(expansion, lattice, configurations, connected=True)
    return Report("four_point", table, summary, failures, plot, tables={"four_point_diagrams": diagrams})


@log_decorator
def run_simulate(spec: ExperimentSpec) -> Report:
    """One set of chains at the configured coupling; at lambda = 0 the free-field checks apply"""
    coupling = spec.lambda_grid[0]
    cfg = spec.sim_for(coupling)
    if spec.checkpoint_path is not None and spec.n_chains == 1:
        measurements = run_chain(cfg, checkpoint_path=spec.checkpoint_path)
    else:
        measurements = run_chains(cfg, spec.n_chains, spec.n_processes)
    table = measurements.to_frame()
    summary = {"lambda": coupling, "samples": measurements.n_added, "batches": measurements.n_batches}
    for name in ("phi2", "phi4", "energy"):
        value = measurements.observable(name)
        summary[name] = float(value.values)
        summary[f"{name}_stderr"] = float(value.stderr)
    failures = []
    if coupling == 0:
        two_point = measurements.two_point()
        with np.errstate(divide="ignore", invalid="ignore"):
            z_scores = (two_point.values - cfg.lattice.green_kernel.values) / two_point.stderr
        coverage = float(np.mean(np.abs(z_scores) <= 3.0))
        summary["coverage_3sigma"] = coverage
        if coverage < 0.95:
            failures.append(f"S^2 matches C within 3 stderr at only {coverage:.1%} of separations")
        for name in ("phi", "phi3"):
            value = measurements.observable(name)
            if abs(float(value.values)) > 3.0 * float(value.stderr):
                failures.append(f"odd moment {name} = {float(value.values):.3g} is not within 3 stderr of 0")
    return Report(f"simulate_lambda{coupling:g}", table, summary, failures, tables={"measurements": table})


RUNNERS = {
    "expand": run_expand,
    "oracle": run_oracle_suite,
    "simulate": run_simulate,
    "asymptoticity": run_asymptoticity,
    "two_point": run_two_point,
    "four_point": run_four_point,
}


def run_experiment(spec: ExperimentSpec) -> Report:
    """Dispatch an ExperimentSpec to its runner"""
    if spec.kind == "toy":
        return run_toy(spec.lambda_grid[0], spec.toy_terms)
    if spec.kind not in RUNNERS:
        raise ExperimentError(spec.kind, "no runner for this experiment kind")
    return RUNNERS[spec.kind](spec)
