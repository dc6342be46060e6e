#!/usr/bin/env python3
"""Reduced end-to-end comparison grid with rendered tables.

Runs one noise level of the benchmark grid at desk scale (150 runs
instead of 1000), calibrating each momentum-fractional scenario against
its paired LMS, then prints the fitness table and writes the full file
set (CSV + text tables, curve files, aggregates dump) to
``demo_results/``.  The full-scale protocol is one CLI call:

    lmslab grid --seed 42 --out results/
"""

from lmslab import GridConfig, full_grid
from lmslab.reporting import fitness_table, render_table_text, write_grid_outputs

config = GridConfig(
    noise_levels=(0.30,),
    n_runs=150,
    calibration_runs=100,
    base_seed=42,
)

print("running 9 momentum-fractional scenarios plus 3 paired LMS rows...")
entries = full_grid(config)

table = fitness_table("0.30", entries)
print()
print(render_table_text(table))

paths = write_grid_outputs(entries, "demo_results")
print("wrote:")
for path in paths:
    print("  ", path)
