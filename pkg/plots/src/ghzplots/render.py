"""Comparison figures from distillation result CSVs.

Consumes the simulator's CSV schema (protocol, n, N, K, R, p_gate, eta,
f_in, f_out, f_out_se, p_succ, p_succ_se, samples, seed) and renders
input-fidelity comparisons: baseline protocols as lines (style keyed to
the protocol/parameter group), optimized circuits as scatter points with
marker shape keyed to N and color keyed to R, error bars from the *_se
columns.  No numbers are computed here beyond the error bars; all science
values come from the simulator.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

REQUIRED_COLUMNS = (
    "protocol", "n", "N", "K", "R", "p_gate", "eta", "f_in",
    "f_out", "f_out_se", "p_succ", "p_succ_se", "samples", "seed",
)

LAYOUTS = ("stacked", "side_by_side")

MARKERS = ["o", "s", "^", "D", "v", "P", "X", "*"]
COLORS = ["tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple",
          "tab:brown", "tab:pink", "tab:gray"]
LINESTYLES = ["-", "--", ":", "-."]

SCATTER_PROTOCOLS = ("optimized",)


class ColumnError(ValueError):
    """A referenced CSV column does not exist."""


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple
    output: str
    layout: str = "stacked"  # "stacked" = one column, "side_by_side" = one row
    x: str = "f_in"
    y_top: str = "f_out"
    y_bottom: str = "p_succ"
    x_label: str = "input fidelity"
    y_top_label: str = "output fidelity"
    y_bottom_label: str = "success probability"
    title: str = ""

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}")
        if not self.csv_paths:
            raise ValueError("need at least one CSV path")

    @classmethod
    def from_json(cls, text: str) -> "PlotSpec":
        doc = json.loads(text)
        doc["csv_paths"] = tuple(doc["csv_paths"])
        return cls(**doc)


def load_rows(paths) -> list[dict]:
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise ColumnError(f"{path}: missing column(s) {', '.join(missing)}")
            rows.extend(reader)
    if not rows:
        raise ValueError("no data rows in the given CSVs")
    return rows


def _series_key(row):
    return (row["protocol"], int(row["N"]), int(row["R"]))


def _finite(row, col):
    v = float(row[col])
    return None if math.isnan(v) else v


def _plot_panel(ax, rows, x_col, y_col, se_col, spec):
    groups: dict = {}
    for row in rows:
        groups.setdefault(_series_key(row), []).append(row)
    n_values = sorted({k[1] for k in groups})
    r_values = sorted({k[2] for k in groups})
    line_count = 0
    for key in sorted(groups):
        protocol, n_raw, r_size = key
        pts = [(float(r[x_col]), _finite(r, y_col), _finite(r, se_col))
               for r in groups[key]]
        pts = [(x, y, se or 0.0) for x, y, se in pts if y is not None]
        if not pts:
            continue
        pts.sort()
        xs, ys, ses = zip(*pts)
        color = COLORS[r_values.index(r_size) % len(COLORS)]
        marker = MARKERS[n_values.index(n_raw) % len(MARKERS)]
        label = f"{protocol} N={n_raw} R={r_size}"
        if protocol in SCATTER_PROTOCOLS:
            ax.errorbar(xs, ys, yerr=ses, linestyle="none", marker=marker,
                        color=color, capsize=2, markersize=6, label=label)
        else:
            style = LINESTYLES[line_count % len(LINESTYLES)]
            line_count += 1
            ax.errorbar(xs, ys, yerr=ses, linestyle=style, marker=marker,
                        color=color, markersize=3, linewidth=1.2, label=label)
    ax.set_xlabel(spec.x_label)
    ax.grid(True, alpha=0.3)


def render(spec: PlotSpec) -> str:
    """Write the figure and return the output path."""
    rows = load_rows(spec.csv_paths)
    for col in (spec.x, spec.y_top, spec.y_bottom):
        if col not in REQUIRED_COLUMNS:
            raise ColumnError(f"unknown column {col!r}")
    if spec.layout == "stacked":
        fig, (ax_top, ax_bottom) = plt.subplots(2, 1, figsize=(6.2, 7.4), sharex=True)
    else:
        fig, (ax_top, ax_bottom) = plt.subplots(1, 2, figsize=(11.0, 4.4))
    _plot_panel(ax_top, rows, spec.x, spec.y_top, spec.y_top + "_se", spec)
    ax_top.set_ylabel(spec.y_top_label)
    _plot_panel(ax_bottom, rows, spec.x, spec.y_bottom, spec.y_bottom + "_se", spec)
    ax_bottom.set_ylabel(spec.y_bottom_label)
    ax_top.legend(fontsize=7, loc="best")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150, metadata={"Software": "ghzdist-plots"})
    plt.close(fig)
    return spec.output
