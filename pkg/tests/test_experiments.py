from dataclasses import replace

import numpy as np
import pytest

from satvec.config import parse_config
from satvec.experiments import (
    SUMMARY_COLUMNS,
    TRACE_COLUMNS,
    execute_experiment,
    rows_to_csv,
    run_experiment,
    sample_trial,
    trace_path_for,
)

FAST = "schemes = rsu_only, random\ntrials = 2\n"


def strip_wall_time(csv_text: str) -> str:
    lines = csv_text.strip().split("\n")
    header = lines[0].split(",")
    keep = [i for i, name in enumerate(header) if name != "wall_time_s"]
    return "\n".join(
        ",".join(line.split(",")[i] for i in keep) for line in lines
    )


class TestSampling:
    def test_trial_reproducible(self):
        spec = parse_config("")
        a = sample_trial(spec, 3)
        b = sample_trial(spec, 3)
        assert np.array_equal(a.cfg.task_bits, b.cfg.task_bits)
        assert np.array_equal(a.realization.sat_channels, b.realization.sat_channels)
        assert np.array_equal(a.realization.terr_gains, b.realization.terr_gains)

    def test_task_sizes_within_band(self):
        spec = parse_config("")
        for trial in range(10):
            bits = sample_trial(spec, trial).cfg.task_bits
            assert np.all(bits >= 0.8 * 8e6) and np.all(bits <= 1.2 * 8e6)

    def test_noise_powers_follow_density(self):
        cfg = sample_trial(parse_config(""), 0).cfg
        density = 10 ** ((-174.0 - 30.0) / 10.0)
        assert cfg.noise_terr_w == pytest.approx(density * 2e6, rel=1e-12)
        assert cfg.noise_sat_w == pytest.approx(density * 200e6, rel=1e-12)


class TestRows:
    def test_row_count_and_order(self):
        spec = parse_config(
            FAST + "sweep_param = num_vts\nsweep_values = 2,3,4\n"
        )
        summary, traces = execute_experiment(spec)
        assert len(summary) == 3 * 2 * 2  # values x schemes x trials
        assert traces == []
        key = [(r["sweep_value"], r["scheme"], r["trial"]) for r in summary]
        assert key == sorted(key, key=lambda k: (k[0], ("rsu_only", "random").index(k[1]), k[2]))

    def test_summary_header(self):
        spec = parse_config(FAST)
        summary, _ = execute_experiment(spec)
        text = rows_to_csv(summary, SUMMARY_COLUMNS)
        assert text.split("\n", 1)[0] == (
            "sweep_param,sweep_value,scheme,trial,seed,objective,"
            "delay_sum_s,energy_j,iterations,converged,wall_time_s"
        )

    def test_deterministic_modulo_wall_time(self):
        spec = parse_config(FAST)
        first, _ = execute_experiment(spec)
        second, _ = execute_experiment(spec)
        a = strip_wall_time(rows_to_csv(first, SUMMARY_COLUMNS))
        b = strip_wall_time(rows_to_csv(second, SUMMARY_COLUMNS))
        assert a == b

    def test_seed_changes_rows(self):
        base = parse_config(FAST)
        other = replace(base, seed=1)
        a = strip_wall_time(rows_to_csv(execute_experiment(base)[0], SUMMARY_COLUMNS))
        b = strip_wall_time(rows_to_csv(execute_experiment(other)[0], SUMMARY_COLUMNS))
        assert a != b

    def test_trace_rows_emitted(self):
        spec = parse_config("schemes = proposed\ntrials = 1\nemit_trace = true\n")
        summary, traces = execute_experiment(spec)
        assert len(summary) == 1
        assert len(traces) >= 2  # at least iterations 0 and 1
        assert traces[0]["iteration"] == 0

    def test_infeasible_trials_recorded_not_raised(self):
        # deadline far below the uplink time: every scheme is infeasible
        spec = parse_config(FAST + "max_delay_s = 1e-6\n")
        summary, _ = execute_experiment(spec)
        assert len(summary) == 4
        assert all(row["converged"] is False for row in summary)

    def test_nine_significant_digits(self):
        text = rows_to_csv(
            [{"x": 0.123456789123, "y": 12345678912.0}], ("x", "y")
        )
        assert text.splitlines()[1] == "0.123456789,1.23456789e+10"


class TestFiles:
    def test_run_experiment_writes_csv(self, tmp_path):
        out = tmp_path / "res.csv"
        spec = replace(parse_config(FAST), output_path=str(out))
        summary, traces, written = run_experiment(spec)
        assert written == [str(out)]
        content = out.read_text()
        assert content.startswith("sweep_param,")
        assert content.endswith("\n")
        assert len(content.strip().split("\n")) == 1 + len(summary)

    def test_trace_file_alongside_summary(self, tmp_path):
        out = tmp_path / "res.csv"
        spec = replace(
            parse_config("schemes = proposed\ntrials = 1\nemit_trace = true\n"),
            output_path=str(out),
        )
        summary, traces, written = run_experiment(spec)
        assert written == [str(out), str(tmp_path / "res_trace.csv")]
        header = (tmp_path / "res_trace.csv").read_text().split("\n", 1)[0]
        assert header == ",".join(TRACE_COLUMNS)

    def test_trace_only_mode(self, tmp_path):
        out = tmp_path / "conv.csv"
        spec = replace(
            parse_config("schemes = proposed\ntrials = 1\n"), output_path=str(out)
        )
        summary, traces, written = run_experiment(spec, trace_only=True)
        assert written == [str(out)]
        text = out.read_text()
        assert text.split("\n", 1)[0] == ",".join(TRACE_COLUMNS)
        # byte-identical across runs: no wall-time column in traces
        run_experiment(spec, trace_only=True)
        assert out.read_text() == text

    def test_trace_path_naming(self):
        assert trace_path_for("a/b.csv") == "a/b_trace.csv"
        assert trace_path_for("noext") == "noext_trace"
