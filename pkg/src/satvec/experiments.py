"""Batch experiment driver: sweeps, Monte-Carlo trials, CSV output.

Every trial is reproducible from (seed, trial index): task sizes, VT
geometry, SAP geometry and channel fading each draw from their own
substream, so results are byte-stable across runs and insensitive to new
random quantities being added later. Summary rows carry one line per
(sweep value, scheme, trial); convergence traces go to a sibling
``*_trace.csv`` with their own fixed schema. One infeasible trial is
recorded as a ``converged=false`` row and never aborts the sweep.
"""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelRealization, FadingParams, GeometryParams, realize_channels
from .config import ExperimentSpec
from .errors import InfeasibleProblem
from .model import ScenarioConfig
from .orchestrator import (
    SolveResult,
    baseline_random,
    baseline_rsu_only,
    baseline_saps_only,
    multi_start,
)
from .rng import derive_seed, substream

SUMMARY_COLUMNS = (
    "sweep_param",
    "sweep_value",
    "scheme",
    "trial",
    "seed",
    "objective",
    "delay_sum_s",
    "energy_j",
    "iterations",
    "converged",
    "wall_time_s",
)

TRACE_COLUMNS = (
    "sweep_param",
    "sweep_value",
    "scheme",
    "trial",
    "seed",
    "iteration",
    "objective",
)

#: columns excluded from the byte-level determinism contract
NONDETERMINISTIC_COLUMNS = ("wall_time_s",)


@dataclass
class TrialSetup:
    cfg: ScenarioConfig
    realization: ChannelRealization


def _apply_sweep(spec: ExperimentSpec, value) -> ExperimentSpec:
    scenario = replace(spec.scenario, **{spec.sweep_param: value})
    return replace(spec, scenario=scenario)


def sample_trial(spec: ExperimentSpec, trial: int) -> TrialSetup:
    """Draw one scenario snapshot and its channel realization."""
    sc = spec.scenario
    num_vts, num_saps = sc.num_vts, sc.num_saps

    tasks = substream(spec.seed, trial, "tasks").uniform(
        0.8 * sc.task_bits, 1.2 * sc.task_bits, num_vts
    )
    geo_rng = substream(spec.seed, trial, "geometry")
    vt_dist = geo_rng.uniform(sc.vt_distance_min_m, sc.vt_distance_max_m, num_vts)
    sap_dist = (
        sc.sap_distance_km
        + geo_rng.uniform(0.0, sc.sap_distance_jitter_km, (num_vts, num_saps))
    ) * 1e3
    boresight = geo_rng.uniform(
        0.0, math.radians(sc.boresight_max_deg), (num_vts, num_saps)
    )

    noise_density_w = 10.0 ** ((sc.noise_density_dbm_hz - 30.0) / 10.0)
    cfg = ScenarioConfig(
        num_vts=num_vts,
        num_saps=num_saps,
        total_bandwidth_hz=sc.total_bandwidth_hz,
        sat_bandwidth_hz=sc.sat_bandwidth_hz,
        vt_tx_power_w=sc.vt_tx_power_w,
        max_precoder_power_w=sc.max_precoder_power_w,
        rsu_freq_hz=sc.rsu_freq_hz,
        cpu_freq_hz=sc.cpu_freq_hz,
        kappa_rsu=sc.kappa_rsu,
        kappa_sap=sc.kappa_sap,
        noise_terr_w=noise_density_w * sc.total_bandwidth_hz,
        noise_sat_w=noise_density_w * sc.sat_bandwidth_hz,
        weight_beta=sc.weight_beta,
        max_delay_s=sc.max_delay_s,
        task_bits=tasks,
        delay_aggregation=sc.delay_aggregation,
    )
    geometry = GeometryParams(
        carrier_frequency_hz=sc.carrier_frequency_hz,
        sap_distances_m=sap_dist,
        boresight_angles_rad=boresight,
        antenna_factor=sc.antenna_factor,
        vt_distances_m=vt_dist,
        terrestrial_path_loss_exp=sc.terrestrial_path_loss_exp,
    )
    fading = FadingParams(
        rician_k_linear=10.0 ** (sc.rician_k_db / 10.0),
        shadow_std_db=sc.shadow_std_db,
        seed=derive_seed(spec.seed, trial, "channel"),
    )
    return TrialSetup(cfg=cfg, realization=realize_channels(geometry, fading))


def run_scheme(
    scheme: str, setup: TrialSetup, spec: ExperimentSpec, trial: int
) -> SolveResult | None:
    """Run one offloading scheme on a prepared trial; None if unsolvable."""
    try:
        if scheme == "proposed":
            return multi_start(setup.realization, setup.cfg)
        if scheme == "rsu_only":
            return baseline_rsu_only(setup.realization, setup.cfg)
        if scheme == "saps_only":
            return baseline_saps_only(setup.realization, setup.cfg)
        if scheme == "random":
            rng = substream(spec.seed, trial, "random-split")
            return baseline_random(setup.realization, setup.cfg, rng)
    except InfeasibleProblem:
        return None
    raise ValueError(f"unknown scheme {scheme!r}")


def execute_experiment(spec: ExperimentSpec):
    """Run the full sweep; returns (summary_rows, trace_rows) as dicts."""
    summary = []
    traces = []
    schemes = [s for s in ("proposed", "rsu_only", "saps_only", "random") if s in spec.schemes]
    for value in spec.sweep_values:
        swept = _apply_sweep(spec, value)
        for scheme in schemes:
            for trial in range(spec.trials):
                setup = sample_trial(swept, trial)
                tic = time.perf_counter()
                result = run_scheme(scheme, setup, swept, trial)
                wall = time.perf_counter() - tic
                if result is None:
                    row = {
                        "sweep_param": spec.sweep_param,
                        "sweep_value": value,
                        "scheme": scheme,
                        "trial": trial,
                        "seed": spec.seed,
                        "objective": math.inf,
                        "delay_sum_s": math.inf,
                        "energy_j": math.inf,
                        "iterations": 0,
                        "converged": False,
                        "wall_time_s": wall,
                    }
                else:
                    row = {
                        "sweep_param": spec.sweep_param,
                        "sweep_value": value,
                        "scheme": scheme,
                        "trial": trial,
                        "seed": spec.seed,
                        "objective": result.breakdown.objective,
                        "delay_sum_s": float(result.breakdown.t_tot.sum()),
                        "energy_j": result.breakdown.e_tot,
                        "iterations": result.iterations,
                        "converged": result.converged,
                        "wall_time_s": wall,
                    }
                summary.append(row)
                if spec.emit_trace and result is not None:
                    for point in result.trace:
                        traces.append(
                            {
                                "sweep_param": spec.sweep_param,
                                "sweep_value": value,
                                "scheme": scheme,
                                "trial": trial,
                                "seed": spec.seed,
                                "iteration": point.iteration,
                                "objective": point.objective,
                            }
                        )
    return summary, traces


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"
    return str(value)


def rows_to_csv(rows, columns) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_value(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def trace_path_for(output_path: str) -> str:
    stem, dot, ext = output_path.rpartition(".")
    if not dot:
        return output_path + "_trace"
    return f"{stem}_trace.{ext}"


def run_experiment(spec: ExperimentSpec, trace_only: bool = False):
    """Execute the sweep and write CSV output.

    Returns (summary_rows, trace_rows, written_paths). With ``trace_only``
    the summary is still computed but only trace rows are written (the
    convergence-curve mode).
    """
    if trace_only:
        spec = replace(spec, emit_trace=True)
    summary, traces = execute_experiment(spec)
    written = []
    if trace_only:
        with open(spec.output_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(rows_to_csv(traces, TRACE_COLUMNS))
        written.append(spec.output_path)
    else:
        with open(spec.output_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(rows_to_csv(summary, SUMMARY_COLUMNS))
        written.append(spec.output_path)
        if spec.emit_trace:
            tpath = trace_path_for(spec.output_path)
            with open(tpath, "w", encoding="utf-8", newline="") as handle:
                handle.write(rows_to_csv(traces, TRACE_COLUMNS))
            written.append(tpath)
    return summary, traces, written
