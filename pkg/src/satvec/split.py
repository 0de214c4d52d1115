"""Per-VT task splitting with fixed shares and precoders.

With uplink shares and precoders held fixed, each VT's contribution to the
weighted cost is piecewise linear in the remotely computed bit count: the
delay part is the max of a rising (remote) and a falling (local) line, the
energy part is linear. The minimum therefore sits at one of at most three
candidates -- the interval endpoints and the balance point where the two
compute paths take equally long -- and the per-VT problems are independent.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import InfeasibleProblem
from .model import Decision, ScenarioConfig, _all_sat_rates, _safe_div, rate_terrestrial


@dataclass
class SplitSubproblem:
    """Per-VT data of the split decision (all arrays have length I)."""

    rate_sat: np.ndarray            # satellite-stream rate (bits/s)
    rate_terr: np.ndarray           # uplink rate (bits/s)
    t_trans: np.ndarray             # fixed uplink delay
    local_energy_slope: np.ndarray  # J/bit of local compute
    remote_energy_slope: np.ndarray  # J/bit of remote compute + transmit
    rsu_rate: float                 # local compute rate (bits/s)
    cpu_rate: float                 # remote compute rate (bits/s)
    budget: np.ndarray              # total bits per VT
    slack: np.ndarray               # deadline headroom after the uplink


def build_split_subproblem(
    decision: Decision, realization: ChannelRealization, cfg: ScenarioConfig
) -> SplitSubproblem:
    r_sat = _all_sat_rates(realization, decision.precoders, cfg)
    r_terr = np.array(
        [
            rate_terrestrial(decision.alpha[i], cfg, realization.terr_gains[i])
            for i in range(cfg.num_vts)
        ]
    )
    total_bits = decision.total_bits
    t_trans = np.array(
        [_safe_div(total_bits[i], r_terr[i]) for i in range(cfg.num_vts)]
    )
    stream_power = np.sum(np.abs(decision.precoders) ** 2, axis=1)
    local_slope = np.full(cfg.num_vts, cfg.kappa_rsu * cfg.rsu_freq_hz**2)
    remote_slope = cfg.kappa_sap * cfg.cpu_freq_hz**2 + np.array(
        [_safe_div(stream_power[i], r_sat[i]) if r_sat[i] > 0 else 0.0
         for i in range(cfg.num_vts)]
    )
    return SplitSubproblem(
        rate_sat=r_sat,
        rate_terr=r_terr,
        t_trans=t_trans,
        local_energy_slope=local_slope,
        remote_energy_slope=remote_slope,
        rsu_rate=cfg.rsu_freq_hz,
        cpu_rate=cfg.cpu_freq_hz,
        budget=total_bits.copy(),
        slack=cfg.max_delay_s - t_trans,
    )


def split_cost(sub: SplitSubproblem, cfg: ScenarioConfig, i: int, remote_bits) -> float:
    """VT i's split-dependent cost at the given remote bit count."""
    remote_bits = np.asarray(remote_bits, dtype=float)
    local_bits = sub.budget[i] - remote_bits
    t_remote = (
        (remote_bits / sub.rate_sat[i] if sub.rate_sat[i] > 0 else np.where(remote_bits > 0, np.inf, 0.0))
        + remote_bits / sub.cpu_rate
    )
    t_local = local_bits / sub.rsu_rate
    delay = np.maximum(t_remote, t_local)
    energy = (
        sub.local_energy_slope[i] * local_bits
        + sub.remote_energy_slope[i] * remote_bits
    )
    out = cfg.weight_beta * delay + (1.0 - cfg.weight_beta) * energy
    return float(out) if out.ndim == 0 else out


def solve_split(sub: SplitSubproblem, cfg: ScenarioConfig):
    """Exact candidate-point minimizer; returns (local_bits, remote_bits).

    Ties break toward more local bits. Raises when a VT has no
    deadline-feasible split.
    """
    num = len(sub.budget)
    remote = np.zeros(num)
    for i in range(num):
        budget = sub.budget[i]
        if budget <= 0:
            continue
        if sub.slack[i] <= 0:
            raise InfeasibleProblem(
                f"VT {i}: uplink alone exceeds the deadline, no split is feasible"
            )
        # deadline-feasible interval for the remote bit count
        lo = max(0.0, budget - sub.slack[i] * sub.rsu_rate)
        if sub.rate_sat[i] > 0:
            per_bit_remote = 1.0 / sub.rate_sat[i] + 1.0 / sub.cpu_rate
            hi = min(budget, sub.slack[i] / per_bit_remote)
        else:
            per_bit_remote = None
            hi = 0.0
        if lo > hi * (1.0 + 1e-12):
            raise InfeasibleProblem(
                f"VT {i}: no deadline-feasible split "
                f"(remote bits would need to lie in [{lo:.6g}, {hi:.6g}])"
            )
        hi = max(hi, lo)
        candidates = [lo, hi]
        if per_bit_remote is not None:
            # balance point: remote and local compute paths take equally long
            kink = (budget / sub.rsu_rate) / (per_bit_remote + 1.0 / sub.rsu_rate)
            candidates.append(min(max(kink, lo), hi))
        costs = [split_cost(sub, cfg, i, s) for s in candidates]
        best = min(range(len(candidates)), key=lambda k: (costs[k], candidates[k]))
        remote[i] = candidates[best]
    return sub.budget - remote, remote
