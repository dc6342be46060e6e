"""Render benchmark aggregates into tables and learning-curve data files.

Two table kinds per noise level mirror the benchmark's presentation:

* fitness tables -- mean NWD at each checkpoint, one row per algorithm
  configuration (three fractional orders then the paired LMS, per
  momentum block);
* estimation tables -- the run-averaged final parameters, their MSE
  against the truth, and a trailing "True values" row.

Each table is written twice: a machine-readable CSV with full-precision
values (``repr`` round-trip exact) and an aligned plain-text rendering
with display rounding (half-even, four decimals; MSE in scientific
notation).  Learning-curve files are plain CSV columns suitable for any
external plotting tool.  All writers are deterministic byte for byte
given identical aggregates.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .experiment import AggregateResult, GridEntry, ScenarioConfig
from .filters import Variant
from .metrics import MetricSpace
from .signal_model import benchmark_spec

__all__ = [
    "ReportTable",
    "fitness_table",
    "estimation_table",
    "learning_curves",
    "render_table_csv",
    "render_table_text",
    "parse_table_csv",
    "write_grid_outputs",
    "write_aggregates_csv",
    "read_aggregates_csv",
    "grid_file_names",
]


@dataclass
class ReportTable:
    """A column-ordered numeric table with row labels."""

    title: str
    column_headers: list[str]
    rows: list[tuple[str, list[float]]]
    highlight_rows: list[int] = field(default_factory=list)
    column_formats: list[str] | None = None

    def __post_init__(self):
        for label, values in self.rows:
            if len(values) != len(self.column_headers):
                raise ValueError(f"row {label!r} has {len(values)} values, "
                                 f"expected {len(self.column_headers)}")


def _block_order(entries: list[GridEntry]) -> list[GridEntry]:
    if not entries:
        raise ValueError("no scenarios supplied")
    sigmas = {e.sigma_label for e in entries}
    if len(sigmas) != 1:
        raise ValueError(f"entries span several noise levels: {sorted(sigmas)}")
    return list(entries)


def fitness_table(sigma_label: str, entries: list[GridEntry]) -> ReportTable:
    """Mean NWD per checkpoint for one noise level (12 rows x checkpoints)."""
    entries = _block_order(entries)
    checkpoints = entries[0].scenario.checkpoints
    rows = []
    highlight = []
    for i, entry in enumerate(entries):
        mean_nwd = entry.aggregate.mean_nwd_at_checkpoints
        if len(mean_nwd) != len(checkpoints):
            raise ValueError("checkpoint grids differ between scenarios")
        if entry.variant is Variant.LMS:
            highlight.append(i)
        rows.append((entry.label, [float(v) for v in mean_nwd]))
    return ReportTable(
        title=f"Mean NWD at checkpoints, noise level {sigma_label}",
        column_headers=[str(int(c)) for c in checkpoints],
        rows=rows,
        highlight_rows=highlight,
    )


def estimation_table(sigma_label: str, entries: list[GridEntry]) -> ReportTable:
    """Run-averaged final parameters plus MSE for one noise level."""
    entries = _block_order(entries)
    _, truth = benchmark_spec()
    n_params = len(truth.theta_aphi)
    rows = []
    highlight = []
    for i, entry in enumerate(entries):
        agg = entry.aggregate
        values = [float(v) for v in agg.mean_final_theta_aphi] + [agg.mse_of_mean]
        if entry.variant is Variant.LMS:
            highlight.append(i)
        rows.append((entry.label, values))
    rows.append(("True values", [float(v) for v in truth.theta_aphi] + [0.0]))
    return ReportTable(
        title=f"Final parameter means and MSE, noise level {sigma_label}",
        column_headers=[f"theta_{i + 1}" for i in range(n_params)] + ["MSE"],
        rows=rows,
        highlight_rows=highlight,
        column_formats=[".4f"] * n_params + [".2E"],
    )


def learning_curves(entries: list[GridEntry]) -> str:
    """Columnar checkpoint curves: one iteration column, one column per series."""
    if not entries:
        raise ValueError("no series supplied")
    checkpoints = entries[0].scenario.checkpoints
    out = io.StringIO()
    out.write("iteration," + ",".join(e.label for e in entries) + "\n")
    columns = []
    for e in entries:
        col = e.aggregate.mean_nwd_at_checkpoints
        if len(col) != len(checkpoints):
            raise ValueError("checkpoint grids differ between series")
        columns.append(col)
    for k, it in enumerate(checkpoints):
        out.write(str(int(it)) + "," + ",".join(repr(float(c[k])) for c in columns) + "\n")
    return out.getvalue()


def render_table_csv(table: ReportTable) -> str:
    """Machine-readable table: full-precision values, one header line."""
    out = io.StringIO()
    out.write("label," + ",".join(table.column_headers) + "\n")
    for label, values in table.rows:
        out.write(label + "," + ",".join(repr(float(v)) for v in values) + "\n")
    return out.getvalue()


def parse_table_csv(text: str) -> ReportTable:
    """Inverse of :func:`render_table_csv` (labels must be comma-free)."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty table")
    headers = lines[0].split(",")[1:]
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append((cells[0], [float(c) for c in cells[1:]]))
    return ReportTable(title="", column_headers=headers, rows=rows)


def render_table_text(table: ReportTable) -> str:
    """Aligned human-readable table with display rounding.

    Rounding is decimal half-even via :func:`format` and never feeds
    back into any computation.
    """
    formats = table.column_formats or [".4f"] * len(table.column_headers)
    header_cells = ["method"] + list(table.column_headers)
    body = []
    for i, (label, values) in enumerate(table.rows):
        mark = "* " if i in table.highlight_rows else "  "
        cells = [mark + label] + [format(v, fmt) for v, fmt in zip(values, formats)]
        body.append(cells)
    widths = [max(len(r[c]) for r in [header_cells] + body) for c in range(len(header_cells))]
    out = io.StringIO()
    out.write(table.title + "\n")
    out.write("  ".join(h.ljust(w) for h, w in zip(header_cells, widths)).rstrip() + "\n")
    for cells in body:
        out.write("  ".join(c.rjust(w) if j else c.ljust(w)
                            for j, (c, w) in enumerate(zip(cells, widths))).rstrip() + "\n")
    if table.highlight_rows:
        out.write("(* reference LMS rows)\n")
    return out.getvalue()


# --- grid output files -------------------------------------------------

_AGG_FIXED_COLUMNS = [
    "sigma_label", "variant", "alpha", "f", "step_size", "lms_eta",
    "noise_std", "n_runs", "n_iters", "checkpoint_interval", "base_seed",
    "metric_space", "divergence_count", "mse_of_mean", "mean_per_run_mse",
]


def write_aggregates_csv(entries: list[GridEntry]) -> str:
    """Serialize grid entries to the machine-readable aggregates dump."""
    if not entries:
        raise ValueError("no entries to serialize")
    checkpoints = entries[0].scenario.checkpoints
    n_params = len(entries[0].aggregate.mean_final_theta_aphi)
    header = (
        _AGG_FIXED_COLUMNS
        + [f"theta_{i + 1}" for i in range(n_params)]
        + [f"nwd_{int(c)}" for c in checkpoints]
    )
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for e in entries:
        s = e.scenario
        cells = [
            e.sigma_label,
            e.variant.value,
            repr(float(e.alpha)),
            "" if e.f is None else repr(float(e.f)),
            repr(float(e.step_size)),
            repr(float(s.lms_eta)),
            repr(float(s.noise_std)),
            str(s.n_runs),
            str(s.n_iters),
            str(s.checkpoint_interval),
            str(s.base_seed),
            s.metric_space.value,
            str(e.aggregate.divergence_count),
            repr(float(e.aggregate.mse_of_mean)),
            repr(float(e.aggregate.mean_per_run_mse)),
        ]
        cells += [repr(float(v)) for v in e.aggregate.mean_final_theta_aphi]
        cells += [repr(float(v)) for v in e.aggregate.mean_nwd_at_checkpoints]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def read_aggregates_csv(text: str) -> list[GridEntry]:
    """Parse an aggregates dump back into grid entries (exact values)."""
    lines = [ln for ln in text.splitlines() if ln]
    if len(lines) < 2:
        raise ValueError("aggregates file has no data rows")
    header = lines[0].split(",")
    n_fixed = len(_AGG_FIXED_COLUMNS)
    if header[:n_fixed] != _AGG_FIXED_COLUMNS:
        raise ValueError("unrecognized aggregates header")
    theta_cols = [h for h in header[n_fixed:] if h.startswith("theta_")]
    nwd_cols = [h for h in header[n_fixed:] if h.startswith("nwd_")]
    entries = []
    for line in lines[1:]:
        cells = line.split(",")
        fixed = dict(zip(_AGG_FIXED_COLUMNS, cells[:n_fixed]))
        blob = cells[n_fixed:]
        theta = np.array([float(v) for v in blob[: len(theta_cols)]])
        nwd_vals = np.array([float(v) for v in blob[len(theta_cols):]])
        scenario = ScenarioConfig(
            noise_std=float(fixed["noise_std"]),
            alpha=float(fixed["alpha"]),
            f=float(fixed["f"]) if fixed["f"] else 0.5,
            lms_eta=float(fixed["lms_eta"]),
            n_runs=int(fixed["n_runs"]),
            n_iters=int(fixed["n_iters"]),
            checkpoint_interval=int(fixed["checkpoint_interval"]),
            base_seed=int(fixed["base_seed"]),
            metric_space=MetricSpace(fixed["metric_space"]),
        )
        aggregate = AggregateResult(
            mean_nwd_at_checkpoints=nwd_vals,
            mean_final_theta_aphi=theta,
            mse_of_mean=float(fixed["mse_of_mean"]),
            mean_per_run_mse=float(fixed["mean_per_run_mse"]),
            divergence_count=int(fixed["divergence_count"]),
        )
        entries.append(GridEntry(
            sigma_label=fixed["sigma_label"],
            variant=Variant(fixed["variant"]),
            alpha=float(fixed["alpha"]),
            f=float(fixed["f"]) if fixed["f"] else None,
            step_size=float(fixed["step_size"]),
            scenario=scenario,
            aggregate=aggregate,
        ))
    return entries


def grid_file_names(entries: list[GridEntry]) -> dict[str, str]:
    """Map of output file name to content for a set of grid entries.

    Per noise level: ``fitness_sigma<s>.csv``/``.txt`` and
    ``estimation_sigma<s>.csv``/``.txt``; per (noise level, fractional
    order): ``curves_sigma<s>_f<f>.csv`` with the three momentum series
    of that order plus every paired LMS series.
    """
    files: dict[str, str] = {}
    sigma_labels = []
    for e in entries:
        if e.sigma_label not in sigma_labels:
            sigma_labels.append(e.sigma_label)
    for sig in sigma_labels:
        block = [e for e in entries if e.sigma_label == sig]
        ftab = fitness_table(sig, block)
        etab = estimation_table(sig, block)
        files[f"fitness_sigma{sig}.csv"] = render_table_csv(ftab)
        files[f"fitness_sigma{sig}.txt"] = render_table_text(ftab)
        files[f"estimation_sigma{sig}.csv"] = render_table_csv(etab)
        files[f"estimation_sigma{sig}.txt"] = render_table_text(etab)
        orders = []
        for e in block:
            if e.f is not None and e.f not in orders:
                orders.append(e.f)
        lms_rows = [e for e in block if e.variant is Variant.LMS]
        for f in orders:
            series = [e for e in block if e.f == f and e.variant is not Variant.LMS]
            files[f"curves_sigma{sig}_f{f:.2f}.csv"] = learning_curves(series + lms_rows)
    return files


def write_grid_outputs(entries: list[GridEntry], out_dir, include_aggregates: bool = True) -> list[Path]:
    """Write tables and curves (plus the aggregates dump); returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = grid_file_names(entries)
    if include_aggregates:
        files["aggregates.csv"] = write_aggregates_csv(entries)
    written = []
    for name in files:
        path = out / name
        path.write_text(files[name])
        written.append(path)
    return written
