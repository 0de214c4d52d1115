"""Alternating optimization over shares, precoders and splits, plus baselines.

One outer iteration solves the three subproblems in a fixed order (shares,
precoders, split). The share and split solves are exact minimizers of
their blocks; the precoder solve is inexact and is accepted only when it
does not increase the true objective, so the recorded objective trace is
non-increasing by construction. The best feasible iterate seen is
returned, which also makes the multi-start result dominate every baseline
it starts from.
"""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelRealization
from .errors import DegenerateRateError, InfeasibleProblem
from .model import CostBreakdown, Decision, ScenarioConfig, check_feasible, evaluate
from .precoding import matched_filter_precoders, solve_precoding_subproblem
from .split import build_split_subproblem, solve_split
from .subchannel import build_alpha_subproblem, solve_alpha

#: slack allowed when asserting the monotone objective trace
TRACE_SLACK = 1e-9


@dataclass
class SolveTrace:
    """Objective record of one full outer iteration."""

    iteration: int
    objective: float
    subproblem_objectives: tuple  # after the share, precoder, split steps
    feasible: bool
    wall_time_s: float


@dataclass
class SolveResult:
    decision: Decision
    breakdown: CostBreakdown
    trace: list
    converged: bool
    iterations: int
    diagnostic: str | None = None


def _uniform_alpha(cfg: ScenarioConfig) -> np.ndarray:
    return np.full(cfg.num_vts, 1.0 / cfg.num_vts)


def _result_from_decision(
    decision: Decision,
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    diagnostic: str | None = None,
) -> SolveResult:
    breakdown = evaluate(decision, realization, cfg)
    violations = check_feasible(decision, realization, cfg)
    trace = [
        SolveTrace(0, breakdown.objective, (breakdown.objective,) * 3, not violations, 0.0)
    ]
    note = diagnostic
    if violations and note is None:
        note = "infeasible: " + ", ".join(violations)
    return SolveResult(
        decision=decision,
        breakdown=breakdown,
        trace=trace,
        converged=not violations,
        iterations=0,
        diagnostic=note,
    )


def alternate_optimize(
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    init: Decision,
    eps: float = 1e-4,
    max_iter: int = 1000,
) -> SolveResult:
    """Cycle the three subproblem solvers until the objective stalls.

    Stops when the objective improves by at most ``eps`` over one full pass
    or after ``max_iter`` passes. Raises if the starting point is
    infeasible; subproblem infeasibility mid-run ends the loop and returns
    the best iterate seen with a diagnostic.
    """
    violations = check_feasible(init, realization, cfg)
    if violations:
        raise InfeasibleProblem("infeasible start: " + ", ".join(violations))

    decision = replace(init)
    f_prev = evaluate(decision, realization, cfg).objective
    trace = [SolveTrace(0, f_prev, (f_prev,) * 3, True, 0.0)]
    best_obj, best_dec = f_prev, decision
    converged = False
    diagnostic = None
    iterations = 0

    for n in range(1, max_iter + 1):
        tic = time.perf_counter()
        try:
            sub = build_alpha_subproblem(decision, realization, cfg)
            decision = replace(decision, alpha=solve_alpha(sub))
            f_alpha = evaluate(decision, realization, cfg).objective

            sol = solve_precoding_subproblem(
                decision, realization, cfg, initial_precoders=decision.precoders
            )
            candidate = replace(decision, precoders=sol.precoders)
            f_cand = evaluate(candidate, realization, cfg).objective
            if f_cand <= f_alpha * (1.0 + 1e-12) + 1e-300:
                decision, f_prec = candidate, f_cand
            else:
                f_prec = f_alpha

            split_sub = build_split_subproblem(decision, realization, cfg)
            local_bits, remote_bits = solve_split(split_sub, cfg)
            decision = replace(
                decision, split_local_bits=local_bits, split_remote_bits=remote_bits
            )
            f_n = evaluate(decision, realization, cfg).objective
        except (InfeasibleProblem, DegenerateRateError) as err:
            diagnostic = f"iteration {n}: {err}"
            break

        iterations = n
        feasible = not check_feasible(decision, realization, cfg)
        trace.append(
            SolveTrace(n, f_n, (f_alpha, f_prec, f_n), feasible, time.perf_counter() - tic)
        )
        if feasible and f_n < best_obj:
            best_obj, best_dec = f_n, decision
        if abs(f_n - f_prev) <= eps:
            converged = True
            break
        f_prev = f_n

    breakdown = evaluate(best_dec, realization, cfg)
    return SolveResult(
        decision=best_dec,
        breakdown=breakdown,
        trace=trace,
        converged=converged,
        iterations=iterations,
        diagnostic=diagnostic,
    )


def baseline_rsu_only(
    realization: ChannelRealization, cfg: ScenarioConfig
) -> SolveResult:
    """Everything computed at the RSU; only the shares are optimized."""
    decision = Decision(
        split_remote_bits=np.zeros(cfg.num_vts),
        split_local_bits=cfg.task_bits.copy(),
        precoders=np.zeros((cfg.num_vts, cfg.num_saps), dtype=complex),
        alpha=_uniform_alpha(cfg),
    )
    diagnostic = None
    try:
        decision = replace(
            decision, alpha=solve_alpha(build_alpha_subproblem(decision, realization, cfg))
        )
    except InfeasibleProblem as err:
        diagnostic = str(err)
    return _result_from_decision(decision, realization, cfg, diagnostic)


def baseline_saps_only(
    realization: ChannelRealization, cfg: ScenarioConfig
) -> SolveResult:
    """Everything forwarded to the satellite tier; precoders and shares optimized."""
    decision = Decision(
        split_remote_bits=cfg.task_bits.copy(),
        split_local_bits=np.zeros(cfg.num_vts),
        precoders=matched_filter_precoders(realization, cfg.max_precoder_power_w / 2.0),
        alpha=_uniform_alpha(cfg),
    )
    diagnostic = None
    try:
        sol = solve_precoding_subproblem(decision, realization, cfg)
        decision = replace(decision, precoders=sol.precoders)
        decision = replace(
            decision, alpha=solve_alpha(build_alpha_subproblem(decision, realization, cfg))
        )
    except (InfeasibleProblem, DegenerateRateError) as err:
        diagnostic = str(err)
    return _result_from_decision(decision, realization, cfg, diagnostic)


def baseline_random(
    realization: ChannelRealization, cfg: ScenarioConfig, rng: np.random.Generator
) -> SolveResult:
    """Uniformly random split, uniform shares, matched filter at half power.

    The drawn remote bit counts are clipped into the deadline-feasible
    interval so the returned decision stays feasible whenever one exists.
    """
    fractions = rng.uniform(0.0, 1.0, cfg.num_vts)
    precoders = matched_filter_precoders(realization, cfg.max_precoder_power_w / 2.0)
    alpha = _uniform_alpha(cfg)
    decision = Decision(
        split_remote_bits=fractions * cfg.task_bits,
        split_local_bits=(1.0 - fractions) * cfg.task_bits,
        precoders=precoders,
        alpha=alpha,
    )
    sub = build_split_subproblem(decision, realization, cfg)
    remote = decision.split_remote_bits.copy()
    for i in range(cfg.num_vts):
        if cfg.task_bits[i] <= 0 or sub.slack[i] <= 0:
            continue
        lo = max(0.0, cfg.task_bits[i] - sub.slack[i] * sub.rsu_rate)
        if sub.rate_sat[i] > 0:
            hi = min(
                cfg.task_bits[i],
                sub.slack[i] / (1.0 / sub.rate_sat[i] + 1.0 / sub.cpu_rate),
            )
        else:
            hi = 0.0
        if lo <= hi:
            remote[i] = min(max(remote[i], lo), hi)
    decision = replace(
        decision,
        split_remote_bits=remote,
        split_local_bits=cfg.task_bits - remote,
    )
    return _result_from_decision(decision, realization, cfg)


def _balanced_start(realization: ChannelRealization, cfg: ScenarioConfig) -> Decision:
    decision = Decision(
        split_remote_bits=cfg.task_bits / 2.0,
        split_local_bits=cfg.task_bits / 2.0,
        precoders=matched_filter_precoders(realization, cfg.max_precoder_power_w / 2.0),
        alpha=_uniform_alpha(cfg),
    )
    return replace(
        decision, alpha=solve_alpha(build_alpha_subproblem(decision, realization, cfg))
    )


def multi_start_runs(
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    eps: float = 1e-4,
    max_iter: int = 1000,
) -> dict:
    """Alternate optimization from each feasible canonical start."""
    starts = {}
    for name, builder in (
        ("rsu_only", lambda: baseline_rsu_only(realization, cfg).decision),
        ("saps_only", lambda: baseline_saps_only(realization, cfg).decision),
        ("balanced", lambda: _balanced_start(realization, cfg)),
    ):
        try:
            starts[name] = builder()
        except (InfeasibleProblem, DegenerateRateError):
            continue
    runs = {}
    for name, start in starts.items():
        try:
            runs[name] = alternate_optimize(realization, cfg, start, eps, max_iter)
        except InfeasibleProblem:
            continue
    return runs


def multi_start(
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    eps: float = 1e-4,
    max_iter: int = 1000,
) -> SolveResult:
    """Best alternate-optimization result over the three canonical starts."""
    runs = multi_start_runs(realization, cfg, eps, max_iter)
    if not runs:
        raise InfeasibleProblem("no feasible starting point for this scenario")
    order = ("rsu_only", "saps_only", "balanced")
    best_name = min(
        sorted(runs, key=order.index), key=lambda name: runs[name].breakdown.objective
    )
    return runs[best_name]
