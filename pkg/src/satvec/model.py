"""Cost accounting for candidate offloading decisions.

Every solver and baseline funnels through :func:`evaluate`, which turns a
(task split, precoders, subchannel shares) triple into per-VT delays,
aggregate energies, and the single weighted objective

    beta * total_delay + (1 - beta) * total_energy.

Each VT's task is first uplinked whole to the RSU; the locally computed
part and the satellite-forwarded part then proceed in parallel, so the
per-VT delay is uplink time plus the larger of the two compute paths.
Evaluation is pure and never returns NaN: a zero rate carrying positive
bits yields an infinite delay and an infinite objective.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import LN2, ChannelRealization

#: relative tolerance for constraint checks (absolute for the share budget)
FEAS_TOL = 1e-9


@dataclass
class ScenarioConfig:
    """Physical and algorithmic parameters of one scenario snapshot."""

    num_vts: int
    num_saps: int
    total_bandwidth_hz: float      # terrestrial OFDMA bandwidth, shared via alpha
    sat_bandwidth_hz: float        # bandwidth of the RSU-to-SAP link
    vt_tx_power_w: float           # uplink transmit power of each VT
    max_precoder_power_w: float    # per-stream cap on ||v_i||^2
    rsu_freq_hz: float             # RSU compute rate (bits/s per VT task)
    cpu_freq_hz: float             # remote CPU compute rate
    kappa_rsu: float               # switched-capacitance coefficient, RSU
    kappa_sap: float               # switched-capacitance coefficient, remote CPU
    noise_terr_w: float            # noise power over the terrestrial band
    noise_sat_w: float             # noise power over the satellite band
    weight_beta: float             # delay weight in [0, 1]
    max_delay_s: float             # per-VT deadline on total delay
    task_bits: np.ndarray          # length-I task sizes
    delay_aggregation: str = "sum"  # "sum" (default) or "max"; solvers assume "sum"

    def __post_init__(self):
        self.task_bits = np.asarray(self.task_bits, dtype=float)
        if not 0.0 <= self.weight_beta <= 1.0:
            raise ValueError("weight_beta must lie in [0, 1]")
        for name in (
            "total_bandwidth_hz",
            "sat_bandwidth_hz",
            "vt_tx_power_w",
            "max_precoder_power_w",
            "rsu_freq_hz",
            "cpu_freq_hz",
            "kappa_rsu",
            "kappa_sap",
            "noise_terr_w",
            "noise_sat_w",
            "max_delay_s",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.num_vts < 1 or self.num_saps < 1:
            raise ValueError("need at least one VT and one SAP")
        if self.task_bits.shape != (self.num_vts,) or np.any(self.task_bits < 0):
            raise ValueError("task_bits must be a length-I nonnegative sequence")
        if self.delay_aggregation not in ("sum", "max"):
            raise ValueError("delay_aggregation must be 'sum' or 'max'")


@dataclass
class Decision:
    """The optimization variables: task split, precoders, subchannel shares."""

    split_remote_bits: np.ndarray   # bits forwarded to the satellite tier
    split_local_bits: np.ndarray    # bits computed at the RSU
    precoders: np.ndarray           # (I, K) complex, row i transmits stream i
    alpha: np.ndarray               # terrestrial bandwidth share per VT

    def __post_init__(self):
        self.split_remote_bits = np.asarray(self.split_remote_bits, dtype=float)
        self.split_local_bits = np.asarray(self.split_local_bits, dtype=float)
        self.precoders = np.atleast_2d(np.asarray(self.precoders, dtype=complex))
        self.alpha = np.asarray(self.alpha, dtype=float)

    @property
    def total_bits(self) -> np.ndarray:
        return self.split_remote_bits + self.split_local_bits


@dataclass
class CostBreakdown:
    """Every delay and energy component behind one objective value."""

    rate_terr: np.ndarray      # uplink rate per VT (bits/s)
    rate_sat: np.ndarray       # satellite-stream rate per VT (bits/s)
    t_trans_terr: np.ndarray   # uplink delay per VT
    t_cp_rsu: np.ndarray       # RSU compute delay per VT
    t_sat: np.ndarray          # satellite transmit + remote compute delay per VT
    t_tot: np.ndarray          # uplink + max(local, remote) per VT
    e_rsu: float               # VT transmit energy + RSU compute energy
    e_sat: float               # precoder transmit energy + remote compute energy
    e_tot: float
    delay_total: float         # aggregated delay entering the objective
    objective: float


def _safe_div(bits: float, rate: float) -> float:
    """bits/rate with the 0-bit and 0-rate corners pinned (never NaN)."""
    if bits <= 0.0:
        return 0.0
    if rate <= 0.0:
        return math.inf
    return bits / rate


def rate_terrestrial(share: float, cfg: ScenarioConfig, terr_gain: float) -> float:
    """Uplink rate of one VT given its bandwidth share."""
    if share < 0:
        raise ValueError("bandwidth share must be nonnegative")
    if share == 0.0:
        return 0.0
    snr = terr_gain * cfg.vt_tx_power_w / cfg.noise_terr_w
    return share * cfg.total_bandwidth_hz * math.log1p(snr) / LN2


def _stream_powers(realization: ChannelRealization, precoders: np.ndarray):
    """Signal powers |h_i . v_j|^2 for all stream pairs, as an (I, I) matrix."""
    inner = realization.sat_channels @ np.atleast_2d(precoders).T
    return np.abs(inner) ** 2


def sinr_sat(
    realization: ChannelRealization, precoders: np.ndarray, i: int, cfg: ScenarioConfig
) -> float:
    """SINR of satellite stream i: own power over cross-stream leakage + noise."""
    powers = _stream_powers(realization, precoders)
    signal = powers[i, i]
    interference = powers[i, :].sum() - powers[i, i]
    return signal / (interference + cfg.noise_sat_w)


def rate_sat(
    realization: ChannelRealization, precoders: np.ndarray, i: int, cfg: ScenarioConfig
) -> float:
    """Satellite-stream rate of VT i (bits/s)."""
    return cfg.sat_bandwidth_hz * math.log1p(sinr_sat(realization, precoders, i, cfg)) / LN2


def _all_sat_rates(
    realization: ChannelRealization, precoders: np.ndarray, cfg: ScenarioConfig
) -> np.ndarray:
    powers = _stream_powers(realization, precoders)
    signal = np.diag(powers)
    interference = powers.sum(axis=1) - signal
    sinr = signal / (interference + cfg.noise_sat_w)
    return cfg.sat_bandwidth_hz * np.log1p(sinr) / LN2


def _weighted(weight: float, value: float) -> float:
    """weight*value with 0 * inf pinned to 0."""
    if weight == 0.0:
        return 0.0
    return weight * value


def evaluate(
    decision: Decision, realization: ChannelRealization, cfg: ScenarioConfig
) -> CostBreakdown:
    """Full cost breakdown of one decision on one channel realization."""
    num = cfg.num_vts
    total_bits = decision.total_bits
    r_terr = np.array(
        [
            rate_terrestrial(decision.alpha[i], cfg, realization.terr_gains[i])
            for i in range(num)
        ]
    )
    r_sat = _all_sat_rates(realization, decision.precoders, cfg)

    t_trans = np.array([_safe_div(total_bits[i], r_terr[i]) for i in range(num)])
    t_cp = decision.split_local_bits / cfg.rsu_freq_hz
    t_sat = np.array(
        [
            _safe_div(decision.split_remote_bits[i], r_sat[i])
            + decision.split_remote_bits[i] / cfg.cpu_freq_hz
            for i in range(num)
        ]
    )
    t_tot = t_trans + np.maximum(t_sat, t_cp)
    delay_total = float(t_tot.max() if cfg.delay_aggregation == "max" else t_tot.sum())

    e_vt_trans = cfg.vt_tx_power_w * float(t_trans.sum())
    e_rsu_cp = cfg.kappa_rsu * cfg.rsu_freq_hz**2 * float(decision.split_local_bits.sum())
    e_rsu = e_vt_trans + e_rsu_cp

    stream_power = np.sum(np.abs(decision.precoders) ** 2, axis=1)
    e_sat_trans = sum(
        _weighted(
            stream_power[i], _safe_div(decision.split_remote_bits[i], r_sat[i])
        )
        for i in range(num)
    )
    e_sat_cp = cfg.kappa_sap * cfg.cpu_freq_hz**2 * float(decision.split_remote_bits.sum())
    e_sat = e_sat_trans + e_sat_cp
    e_tot = e_rsu + e_sat

    objective = _weighted(cfg.weight_beta, delay_total) + _weighted(
        1.0 - cfg.weight_beta, e_tot
    )
    assert not math.isnan(objective)
    return CostBreakdown(
        rate_terr=r_terr,
        rate_sat=r_sat,
        t_trans_terr=t_trans,
        t_cp_rsu=t_cp,
        t_sat=t_sat,
        t_tot=t_tot,
        e_rsu=e_rsu,
        e_sat=e_sat,
        e_tot=e_tot,
        delay_total=delay_total,
        objective=objective,
    )


def check_feasible(
    decision: Decision, realization: ChannelRealization, cfg: ScenarioConfig
) -> list:
    """Names of violated constraints; empty means the decision is feasible.

    Powers, bits and the deadline are checked with relative tolerance;
    the share budget with absolute tolerance. Boundaries are allowed.
    """
    violations = []
    for i in range(cfg.num_vts):
        target = cfg.task_bits[i]
        slack = FEAS_TOL * max(1.0, target)
        if abs(decision.total_bits[i] - target) > slack:
            violations.append(f"split_budget[{i}]")
        if decision.split_local_bits[i] < -slack or decision.split_remote_bits[i] < -slack:
            violations.append(f"split_nonneg[{i}]")

    power_cap = cfg.max_precoder_power_w * (1.0 + FEAS_TOL)
    stream_power = np.sum(np.abs(decision.precoders) ** 2, axis=1)
    for i in range(cfg.num_vts):
        if stream_power[i] > power_cap:
            violations.append(f"precoder_power[{i}]")

    if np.any(decision.alpha < -FEAS_TOL):
        violations.append("alpha_nonneg")
    if float(decision.alpha.sum()) > 1.0 + FEAS_TOL:
        violations.append("alpha_budget")

    t_tot = evaluate(decision, realization, cfg).t_tot
    deadline = cfg.max_delay_s * (1.0 + FEAS_TOL)
    for i in range(cfg.num_vts):
        if t_tot[i] > deadline:
            violations.append(f"deadline[{i}]")
    return violations
