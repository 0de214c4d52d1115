"""Bandwidth-share allocation with fixed splits and precoders.

With the split and precoders held fixed, the share-dependent part of the
weighted cost reduces to sum_i coeff_i / alpha_i, minimized over the
simplex sum(alpha) <= 1 with per-VT lower bounds that enforce the
deadline. The exact KKT solution is alpha_i = max(lower_i, sqrt(coeff_i
/ nu)) with the dual variable nu found by bisection until the budget is
tight.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import LN2, ChannelRealization
from .errors import InfeasibleProblem
from .model import Decision, ScenarioConfig, _all_sat_rates, _safe_div

#: implicit share floor for VTs that carry bits, keeps uplink rates finite
ALPHA_FLOOR = 1e-9

#: bisection stops when |sum(alpha) - 1| falls below this
BUDGET_TOL = 1e-10


@dataclass
class AlphaSubproblem:
    """Reduced data of the share allocation: cost coefficients and bounds."""

    coeff: np.ndarray      # per-VT factor multiplying 1/alpha_i
    alpha_min: np.ndarray  # per-VT lower bound forcing the deadline

    def __post_init__(self):
        self.coeff = np.asarray(self.coeff, dtype=float)
        self.alpha_min = np.asarray(self.alpha_min, dtype=float)


def build_alpha_subproblem(
    decision: Decision, realization: ChannelRealization, cfg: ScenarioConfig
) -> AlphaSubproblem:
    """Collapse the current iterate into coefficients and deadline bounds.

    coeff_i folds both the delay weight and the uplink transmit energy:
    (beta + (1-beta) p_tx) * bits_i / (B log2(1+SNR_i)). The lower bound
    comes from requiring the uplink delay to fit in what the deadline
    leaves after the fixed compute stage; a VT whose compute stage alone
    exceeds the deadline makes the subproblem infeasible.
    """
    total_bits = decision.total_bits
    r_sat = _all_sat_rates(realization, decision.precoders, cfg)
    coeff = np.zeros(cfg.num_vts)
    alpha_min = np.zeros(cfg.num_vts)
    for i in range(cfg.num_vts):
        if total_bits[i] <= 0:
            continue
        snr = realization.terr_gains[i] * cfg.vt_tx_power_w / cfg.noise_terr_w
        denom = cfg.total_bandwidth_hz * math.log1p(snr) / LN2
        if denom <= 0:
            raise InfeasibleProblem(f"VT {i}: zero uplink rate with positive bits")
        weight = cfg.weight_beta + (1.0 - cfg.weight_beta) * cfg.vt_tx_power_w
        coeff[i] = weight * total_bits[i] / denom
        t_cp = decision.split_local_bits[i] / cfg.rsu_freq_hz
        t_sat = (
            _safe_div(decision.split_remote_bits[i], r_sat[i])
            + decision.split_remote_bits[i] / cfg.cpu_freq_hz
        )
        t_fixed = max(t_sat, t_cp)
        if math.isfinite(cfg.max_delay_s):
            if cfg.max_delay_s <= t_fixed:
                raise InfeasibleProblem(
                    f"VT {i}: compute stage ({t_fixed:.3g} s) leaves no room for "
                    f"the uplink within the {cfg.max_delay_s:.3g} s deadline"
                )
            alpha_min[i] = total_bits[i] / (denom * (cfg.max_delay_s - t_fixed))
        alpha_min[i] = max(alpha_min[i], ALPHA_FLOOR)
    return AlphaSubproblem(coeff=coeff, alpha_min=alpha_min)


def solve_alpha(sub: AlphaSubproblem) -> np.ndarray:
    """Exact KKT solution of min sum(coeff/alpha) on the bounded simplex."""
    coeff = sub.coeff
    lower = sub.alpha_min
    if np.any(lower < 0):
        raise InfeasibleProblem("negative share lower bound")
    slack = 1.0 - float(lower.sum())
    if slack < -BUDGET_TOL:
        raise InfeasibleProblem(
            f"share lower bounds sum to {lower.sum():.6g} > 1; deadline unattainable"
        )
    if np.all(coeff == 0.0):
        return lower.copy()
    if slack <= BUDGET_TOL:
        return lower.copy()

    def shares(nu: float) -> np.ndarray:
        return np.maximum(lower, np.sqrt(coeff / nu))

    # sum(shares(nu)) decreases in nu; at nu0 the unbounded solution sums to 1,
    # so the bounded sum is >= 1 there and the root lies at nu >= nu0.
    nu_lo = float(np.sum(np.sqrt(coeff))) ** 2
    nu_hi = nu_lo
    for _ in range(200):
        nu_hi *= 4.0
        if float(shares(nu_hi).sum()) < 1.0:
            break
    else:
        return lower.copy()

    alpha = shares(nu_hi)
    for _ in range(200):
        nu_mid = 0.5 * (nu_lo + nu_hi)
        alpha = shares(nu_mid)
        total = float(alpha.sum())
        if abs(total - 1.0) <= BUDGET_TOL:
            break
        if total > 1.0:
            nu_lo = nu_mid
        else:
            nu_hi = nu_mid
    return alpha
