from dataclasses import dataclass, field
import logging
import os
from typing import Dict, List, Optional

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from ._base import IReportWriter
from ._fits import PowerLawFit

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

FLOAT_FORMAT = "%.12g"


@dataclass
class PlotSpec:
    """Columns of a report table to draw, log-log by default, one series per `hue` value"""

    x: str
    y: str
    yerr: Optional[str] = None
    hue: Optional[str] = None
    logx: bool = True
    logy: bool = True
    fit: Optional[PowerLawFit] = None


@dataclass
class Report:
    """Result of one experiment: a table, scalar summary values and the failed checks.

    `tables` holds further frames keyed by the file stem they are written under.
    """

    name: str
    table: pd.DataFrame
    summary: dict = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    plot: Optional[PlotSpec] = None
    notes: List[str] = field(default_factory=list)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary_frame(self) -> pd.DataFrame:
        rows = [(key, value) for key, value in self.summary.items()]
        rows.append(("passed", self.passed))
        rows.extend(("failure", failure) for failure in self.failures)
        rows.extend(("note", note) for note in self.notes)
        return pd.DataFrame(rows, columns=["key", "value"])


def gnuplot_script(report: Report, csv_name: str) -> str:
    """A gnuplot script drawing the report's plot columns from its CSV"""
    plot = report.plot
    columns = list(report.table.columns)
    x, y = columns.index(plot.x) + 1, columns.index(plot.y) + 1
    lines = [
        "# generated by phi4lab",
        'set datafile separator ","',
        "set terminal pngcairo size 900,600",
        f'set output "{report.name}_gnuplot.png"',
        f'set xlabel "{plot.x}"',
        f'set ylabel "|{plot.y}|"',
        f'set title "{report.name}"',
    ]
    if plot.logx:
        lines.append("set logscale x")
    if plot.logy:
        lines.append("set logscale y")
    if plot.yerr is not None:
        err = columns.index(plot.yerr) + 1
        series = f'"{csv_name}" every ::1 using {x}:(abs(${y})):{err} with yerrorbars title "{plot.y}"'
    else:
        series = f'"{csv_name}" every ::1 using {x}:(abs(${y})) with points title "{plot.y}"'
    if plot.fit is not None:
        series += f", exp({plot.fit.intercept:.12g}) * x**{plot.fit.slope:.12g} title \"slope {plot.fit.slope:.3f}\""
    lines.append(f"plot {series}")
    return "\n".join(lines) + "\n"


def plot_report(report: Report) -> plt.Figure:
    """Figure of the report's plot columns with error bars and the fitted power law"""
    plot = report.plot
    table = report.table.copy()
    table["_abs"] = np.abs(table[plot.y].astype(float))
    fig, ax = plt.subplots(figsize=(8, 5))
    sns.scatterplot(data=table, x=plot.x, y="_abs", hue=plot.hue, ax=ax)
    if plot.yerr is not None:
        ax.errorbar(table[plot.x], table["_abs"], yerr=table[plot.yerr], fmt="none", ecolor="grey", lw=1)
    if plot.fit is not None:
        grid = np.linspace(table[plot.x].min(), table[plot.x].max(), 50)
        ax.plot(grid, plot.fit.predict(grid), color="black", lw=1, linestyle="--", label=f"slope {plot.fit.slope:.3f}")
        ax.legend(loc="best")
    if plot.logx:
        ax.set_xscale("log")
    if plot.logy:
        ax.set_yscale("log")
    ax.set_xlabel(plot.x, size=13)
    ax.set_ylabel(f"|{plot.y}|", size=13)
    ax.set_title(report.name, size=15)
    return fig


class ReportWriter(IReportWriter):
    """Writes `<name>.csv`, `<name>_summary.csv`, one `<key>.csv` per extra table and, for reports
    with a plot, `<name>.gp` and `<name>.png`.

    Example Use Case:
    ```python
    from phi4lab.harness import ReportWriter, run_toy

    paths = ReportWriter("out").write(run_toy(0.01, 100))
    ```
    """

    def __init__(self, output_dir: str = "."):
        self.output_dir = output_dir

    def _path(self, file_name: str) -> str:
        return os.path.join(self.output_dir, file_name)

    def write(self, report: Report) -> List[str]:
        os.makedirs(self.output_dir, exist_ok=True)
        csv_name = f"{report.name}.csv"
        paths = [self._path(csv_name), self._path(f"{report.name}_summary.csv")]
        report.table.to_csv(paths[0], index=False, float_format=FLOAT_FORMAT)
        report.summary_frame().to_csv(paths[1], index=False, float_format=FLOAT_FORMAT)
        for key, extra in report.tables.items():
            extra_path = self._path(f"{key}.csv")
            extra.to_csv(extra_path, index=False, float_format=FLOAT_FORMAT)
            paths.append(extra_path)
        if report.plot is not None and len(report.table):
            script_path = self._path(f"{report.name}.gp")
            with open(script_path, "w") as script:
                script.write(gnuplot_script(report, csv_name))
            figure_path = self._path(f"{report.name}.png")
            fig = plot_report(report)
            fig.savefig(figure_path, metadata={"Software": None})
            plt.close(fig)
            paths.extend([script_path, figure_path])
        logger.debug(f"wrote report {report.name}: {len(report.table)} rows, passed={report.passed}")
        return paths
