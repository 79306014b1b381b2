"""
Module for experiment orchestration: the zero-dimensional toy series, the symbolic expansion, the oracle
identity battery, asymptoticity slopes and the two- and four-point short-distance checks, with CSV,
gnuplot and figure reports. `phi4lab.harness.cli` is the `phi4` command.

### Types
- ExperimentSpec: lattice, coupling grid, order, chain parameters and output directory of one experiment
- Report: table, summary and failed checks of one experiment
- PowerLawFit: log-log slope and intercept with standard errors

### Operations
- run_toy, run_expand, run_oracle_suite, run_asymptoticity, run_two_point, run_four_point, run_simulate
- run_experiment: dispatch on ExperimentSpec.kind
- fit_power_law, jackknife
- ReportWriter: CSV, gnuplot script and PNG
"""
from ._spec import ExperimentError, ExperimentSpec, ToleranceFailure
from ._fits import PowerLawFit, WeightedLogLogFitter, fit_power_law, jackknife
from ._reports import PlotSpec, Report, ReportWriter, gnuplot_script, plot_report
from ._toy import run_toy, toy_partition_function, toy_series_terms
from ._experiments import (
    run_asymptoticity,
    run_expand,
    run_experiment,
    run_four_point,
    run_oracle_suite,
    run_simulate,
    run_two_point,
)


__all__ = [
    ExperimentError,
    ExperimentSpec,
    ToleranceFailure,
    PowerLawFit,
    WeightedLogLogFitter,
    fit_power_law,
    jackknife,
    PlotSpec,
    Report,
    ReportWriter,
    gnuplot_script,
    plot_report,
    run_toy,
    toy_partition_function,
    toy_series_terms,
    run_asymptoticity,
    run_expand,
    run_experiment,
    run_four_point,
    run_oracle_suite,
    run_simulate,
    run_two_point,
]
