"""Reporting tests on fabricated aggregates: layouts, round-trips,
deterministic rendering."""

import math

import numpy as np
import pytest

from lmslab.experiment import AggregateResult, GridEntry, ScenarioConfig
from lmslab.filters import Variant
from lmslab.reporting import (
    ReportTable,
    estimation_table,
    fitness_table,
    grid_file_names,
    learning_curves,
    parse_table_csv,
    read_aggregates_csv,
    render_table_csv,
    render_table_text,
    write_aggregates_csv,
)


def fake_entry(sigma, variant, alpha, f, size, rng, n_ck=10):
    scenario = ScenarioConfig(
        noise_std=math.sqrt(float(sigma)), alpha=alpha, f=f if f else 0.5,
        lms_eta=0.027, n_runs=10, n_iters=100 * n_ck, checkpoint_interval=100,
    )
    agg = AggregateResult(
        mean_nwd_at_checkpoints=rng.uniform(0.01, 0.4, n_ck),
        mean_final_theta_aphi=rng.uniform(0.5, 4.0, 8),
        mse_of_mean=float(rng.uniform(1e-7, 1e-4)),
        mean_per_run_mse=float(rng.uniform(1e-4, 1e-2)),
        divergence_count=0,
    )
    return GridEntry(
        sigma_label=f"{float(sigma):.2f}", variant=variant, alpha=alpha,
        f=f, step_size=size, scenario=scenario, aggregate=agg,
    )


def fake_block(sigma, rng):
    entries = []
    for alpha, eta in zip((0.2, 0.5, 0.8), (0.027, 0.042, 0.1)):
        for f in (0.25, 0.5, 0.75):
            entries.append(fake_entry(sigma, Variant.MFLMS_ASSEMBLED, alpha, f, 0.01, rng))
        entries.append(fake_entry(sigma, Variant.LMS, alpha, None, eta, rng))
    return entries


@pytest.fixture
def block():
    return fake_block(0.30, np.random.default_rng(8))


class TestFitnessTable:
    def test_shape_and_labels(self, block):
        table = fitness_table("0.30", block)
        assert len(table.rows) == 12
        assert len(table.column_headers) == 10
        assert table.column_headers[0] == "100"
        assert table.column_headers[-1] == "1000"
        assert table.rows[0][0] == "mFLMS(f=0.25) a=0.2"
        assert table.rows[3][0] == "LMS(eta=0.027)"
        assert table.highlight_rows == [3, 7, 11]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            fitness_table("0.30", [])

    def test_mixed_sigma_rejected(self, block):
        other = fake_block(0.60, np.random.default_rng(9))
        with pytest.raises(ValueError):
            fitness_table("0.30", block + other[:1])


class TestEstimationTable:
    def test_truth_row_and_columns(self, block):
        table = estimation_table("0.30", block)
        assert len(table.rows) == 13
        label, values = table.rows[-1]
        assert label == "True values"
        np.testing.assert_array_equal(
            values, [1.8, 2.9, 4.0, 2.5, 0.95, 0.8, 0.76, 1.1, 0.0]
        )
        assert table.column_headers[-1] == "MSE"
        assert all(v >= 0 for _, row in table.rows for v in row[-1:])

    def test_text_rendering_formats(self, block):
        table = estimation_table("0.30", block)
        text = render_table_text(table)
        assert "True values" in text
        # MSE column rendered in scientific notation
        assert "E-0" in text

    def test_display_rounding_is_half_even(self):
        # Exactly representable ties round to even; non-ties round to
        # nearest.  The renderer uses format(), which implements this.
        assert format(0.5, ".0f") == "0"
        assert format(1.5, ".0f") == "2"
        assert format(2.5, ".0f") == "2"
        assert format(0.00234999, ".4f") == "0.0023"
        assert format(0.00235001, ".4f") == "0.0024"


class TestRoundTrip:
    def test_csv_round_trip_exact(self, block):
        table = fitness_table("0.30", block)
        parsed = parse_table_csv(render_table_csv(table))
        assert parsed.column_headers == table.column_headers
        for (la, va), (lb, vb) in zip(parsed.rows, table.rows):
            assert la == lb
            assert va == vb  # float(repr(x)) == x, exactly

    def test_aggregates_round_trip_exact(self, block):
        text = write_aggregates_csv(block)
        parsed = read_aggregates_csv(text)
        assert len(parsed) == len(block)
        for a, b in zip(parsed, block):
            assert a.sigma_label == b.sigma_label
            assert a.variant is b.variant
            assert a.label == b.label
            assert a.step_size == b.step_size
            np.testing.assert_array_equal(
                a.aggregate.mean_nwd_at_checkpoints, b.aggregate.mean_nwd_at_checkpoints
            )
            np.testing.assert_array_equal(
                a.aggregate.mean_final_theta_aphi, b.aggregate.mean_final_theta_aphi
            )
            assert a.aggregate.mse_of_mean == b.aggregate.mse_of_mean
        # and re-serialisation is byte-identical
        assert write_aggregates_csv(parsed) == text

    def test_rendering_deterministic(self, block):
        t1 = render_table_text(fitness_table("0.30", block))
        t2 = render_table_text(fitness_table("0.30", block))
        assert t1 == t2


class TestLearningCurves:
    def test_columns_and_iterations(self, block):
        text = learning_curves(block)
        lines = text.strip().split("\n")
        header = lines[0].split(",")
        assert header[0] == "iteration"
        assert len(header) == 13  # iteration + 12 series
        assert [ln.split(",")[0] for ln in lines[1:]] == [
            str(i) for i in range(100, 1001, 100)
        ]

    def test_values_round_trip(self, block):
        text = learning_curves(block[:2])
        lines = text.strip().split("\n")
        first = block[0].aggregate.mean_nwd_at_checkpoints
        col = [float(ln.split(",")[1]) for ln in lines[1:]]
        np.testing.assert_array_equal(col, first)


class TestGridFiles:
    def test_full_grid_file_set(self):
        rng = np.random.default_rng(10)
        entries = []
        for sigma in (0.30, 0.60, 0.90):
            entries += fake_block(sigma, rng)
        files = grid_file_names(entries)
        csv_tables = [n for n in files if n.endswith(".csv") and not n.startswith("curves")]
        txt_tables = [n for n in files if n.endswith(".txt")]
        curves = [n for n in files if n.startswith("curves")]
        assert len(csv_tables) == 6
        assert len(txt_tables) == 6
        assert len(curves) == 9
        assert "fitness_sigma0.30.csv" in files
        assert "estimation_sigma0.90.txt" in files
        assert "curves_sigma0.60_f0.50.csv" in files
        # curve files carry 6 series: 3 momentum values + 3 LMS rows
        header = files["curves_sigma0.30_f0.25.csv"].split("\n")[0]
        assert len(header.split(",")) == 7


class TestReportTableValidation:
    def test_row_width_checked(self):
        with pytest.raises(ValueError):
            ReportTable(title="t", column_headers=["a", "b"], rows=[("r", [1.0])])
