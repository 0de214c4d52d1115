"""Precoder optimization via nested fractional-programming transforms.

With the split and shares fixed, the remaining cost couples the precoders
through each stream's rate. The rate is rewritten twice: a Lagrangian-dual
step replaces the SINR inside the log with an auxiliary ``gamma`` whose
optimum is the SINR itself, and a quadratic transform with auxiliary ``z``
linearizes the remaining signal/interference ratio. A second quadratic
transform with auxiliary ``y`` linearizes the transmit-energy ratio
power/rate. All three auxiliaries have closed-form block updates; the
precoders are then refined by projected gradient descent with Armijo
backtracking under the per-stream power cap, with the per-VT delay bound
handled by an exact penalty.

The transform terms are scaled by ``sat_bandwidth / ln 2`` (the rate
expressed in natural-log units) so that every closed-form update is an
exact block optimum of the surrogate objective; at the closed forms the
surrogate rate coincides with the true rate.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import LN2, ChannelRealization
from .errors import DegenerateRateError, InfeasibleProblem
from .model import Decision, ScenarioConfig, _safe_div, rate_terrestrial

#: projected-gradient termination scale, multiplied by sqrt(I*K)
PG_TOL = 1e-6

#: deadline penalty: ramp factor and cap
PENALTY_RAMP = 10.0
PENALTY_CAP = 1e6


@dataclass
class FpState:
    """Auxiliary variables of the fractional-programming reformulation."""

    gamma: np.ndarray        # SINR surrogate, one per stream
    z: np.ndarray            # rate-ratio auxiliary
    y: np.ndarray            # energy-ratio auxiliary
    lambda_dual: np.ndarray  # dual of the rate constraint (diagnostic only)
    t_aux: float             # epigraph value of the per-VT remote delay


@dataclass
class PrecodingSolution:
    precoders: np.ndarray
    t_aux: float
    fp_state: FpState
    surrogate_rates: np.ndarray
    round_objectives: list


def _rate_scale(cfg: ScenarioConfig) -> float:
    """Bandwidth in natural-log rate units; keeps the transforms stationary."""
    return cfg.sat_bandwidth_hz / LN2


def _stream_matrix(realization: ChannelRealization, precoders: np.ndarray) -> np.ndarray:
    """Complex inner products s[i, j] = h_i . v_j."""
    return realization.sat_channels @ np.atleast_2d(precoders).T


def _signal_and_noise(
    realization: ChannelRealization, precoders: np.ndarray, cfg: ScenarioConfig
):
    """Per-stream own power M and leakage-plus-noise N."""
    s = _stream_matrix(realization, precoders)
    powers = np.abs(s) ** 2
    m = np.diag(powers).copy()
    n = powers.sum(axis=1) - m + cfg.noise_sat_w
    return m, n, s


def update_gamma(
    precoders: np.ndarray, realization: ChannelRealization, cfg: ScenarioConfig
) -> np.ndarray:
    """Closed-form auxiliary update: gamma equals the current SINR."""
    m, n, _ = _signal_and_noise(realization, precoders, cfg)
    return m / n


def update_lambda(gamma: np.ndarray, cfg: ScenarioConfig) -> np.ndarray:
    """Dual variable of the rate constraint; diagnostic only."""
    return cfg.sat_bandwidth_hz / (1.0 + np.asarray(gamma, dtype=float))


def update_z(
    precoders: np.ndarray,
    gamma: np.ndarray,
    realization: ChannelRealization,
    cfg: ScenarioConfig,
) -> np.ndarray:
    """Closed-form quadratic-transform auxiliary for the rate ratio."""
    m, n, _ = _signal_and_noise(realization, precoders, cfg)
    c = _rate_scale(cfg)
    return np.sqrt(c * m * (1.0 + np.asarray(gamma))) / (m + n)


def _surrogate_rates(
    m: np.ndarray, n: np.ndarray, gamma: np.ndarray, z: np.ndarray, cfg: ScenarioConfig
) -> np.ndarray:
    c = _rate_scale(cfg)
    gamma = np.asarray(gamma, dtype=float)
    z = np.asarray(z, dtype=float)
    return (
        2.0 * z * np.sqrt(c * m * (1.0 + gamma))
        - z**2 * (m + n)
        + c * (np.log1p(gamma) - gamma)
    )


def surrogate_rate(
    precoders: np.ndarray,
    gamma: np.ndarray,
    z: np.ndarray,
    i: int,
    cfg: ScenarioConfig,
    realization: ChannelRealization,
) -> float:
    """Surrogate rate of stream i; equals the true rate at the closed forms."""
    m, n, _ = _signal_and_noise(realization, precoders, cfg)
    return float(_surrogate_rates(m, n, gamma, z, cfg)[i])


def update_y(
    precoders: np.ndarray,
    surrogate_rates: np.ndarray,
    decision: Decision,
    cfg: ScenarioConfig,
) -> np.ndarray:
    """Closed-form quadratic-transform auxiliary for the energy ratio."""
    remote = decision.split_remote_bits
    norms2 = np.sum(np.abs(np.atleast_2d(precoders)) ** 2, axis=1)
    y = np.zeros(cfg.num_vts)
    for i in range(cfg.num_vts):
        if remote[i] <= 0:
            continue
        if surrogate_rates[i] <= 0:
            raise DegenerateRateError(
                f"stream {i}: surrogate rate is zero but {remote[i]:.3g} bits are remote"
            )
        y[i] = math.sqrt(remote[i] * norms2[i]) / surrogate_rates[i]
    return y


def constant_cost(
    decision: Decision, realization: ChannelRealization, cfg: ScenarioConfig
) -> float:
    """Precoder-independent energy: both compute energies plus VT transmit."""
    e_cp_rsu = cfg.kappa_rsu * cfg.rsu_freq_hz**2 * float(decision.split_local_bits.sum())
    e_cp_sat = cfg.kappa_sap * cfg.cpu_freq_hz**2 * float(decision.split_remote_bits.sum())
    e_vt = 0.0
    total = decision.total_bits
    for i in range(cfg.num_vts):
        rate = rate_terrestrial(decision.alpha[i], cfg, realization.terr_gains[i])
        e_vt += cfg.vt_tx_power_w * _safe_div(total[i], rate)
    return e_cp_rsu + e_cp_sat + e_vt


def _remote_delays(remote_bits: np.ndarray, rates: np.ndarray, cfg: ScenarioConfig):
    d = np.zeros(len(remote_bits))
    for i, bits in enumerate(remote_bits):
        if bits <= 0:
            continue
        if rates[i] <= 0:
            d[i] = math.inf
        else:
            d[i] = bits / rates[i] + bits / cfg.cpu_freq_hz
    return d


def fp_objective(
    decision: Decision,
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    state: FpState,
    include_constant: bool = True,
) -> float:
    """Surrogate objective at the given auxiliaries, epigraph at its optimum.

    At closed-form auxiliaries this equals the true fixed-split cost of the
    precoders (the deadline cap is not applied here).
    """
    m, n, _ = _signal_and_noise(realization, decision.precoders, cfg)
    rt = _surrogate_rates(m, n, state.gamma, state.z, cfg)
    norms = np.sqrt(np.sum(np.abs(decision.precoders) ** 2, axis=1))
    remote = decision.split_remote_bits
    energy = float(
        np.sum(2.0 * state.y * np.sqrt(remote) * norms - state.y**2 * rt)
    )
    t_need = float(np.max(_remote_delays(remote, rt, cfg), initial=0.0))
    beta = cfg.weight_beta
    const = constant_cost(decision, realization, cfg) if include_constant else 0.0
    delay_term = beta * t_need if beta > 0 else 0.0
    return (1.0 - beta) * (energy + const) + delay_term


def matched_filter_precoders(
    realization: ChannelRealization, power_w: float
) -> np.ndarray:
    """Per-stream matched filter scaled to the given transmit power."""
    h = realization.sat_channels
    norms = np.linalg.norm(h, axis=1)
    v = np.zeros_like(h)
    mask = norms > 0
    v[mask] = np.conj(h[mask]) / norms[mask, None] * math.sqrt(power_w)
    return v


def _project_power(precoders: np.ndarray, cap_w: float) -> np.ndarray:
    norms = np.sqrt(np.sum(np.abs(precoders) ** 2, axis=1))
    scale = np.ones_like(norms)
    over = norms > math.sqrt(cap_w)
    scale[over] = math.sqrt(cap_w) / norms[over]
    return precoders * scale[:, None]


def _penalized_objective(precoders, realization, cfg, state, remote, const, weight):
    """Surrogate objective with the deadline handled by an exact penalty."""
    m, n, _ = _signal_and_noise(realization, precoders, cfg)
    rt = _surrogate_rates(m, n, state.gamma, state.z, cfg)
    norms = np.sqrt(np.sum(np.abs(precoders) ** 2, axis=1))
    energy = float(np.sum(2.0 * state.y * np.sqrt(remote) * norms - state.y**2 * rt))
    d = _remote_delays(remote, rt, cfg)
    t_need = float(np.max(d, initial=0.0))
    beta = cfg.weight_beta
    if t_need <= cfg.max_delay_s:
        value = (1.0 - beta) * (energy + const) + beta * t_need
    else:
        value = (
            (1.0 - beta) * (energy + const)
            + beta * cfg.max_delay_s
            + weight * (t_need - cfg.max_delay_s)
        )
    return value, (m, n, rt, norms, d, t_need)


def _objective_gradient(precoders, realization, cfg, state, remote, aux, weight):
    """Conjugate (Wirtinger) gradient of the penalized surrogate objective."""
    m, n, rt, norms, d, t_need = aux
    h = realization.sat_channels
    s = _stream_matrix(realization, precoders)
    beta = cfg.weight_beta
    c = _rate_scale(cfg)

    # dF/d(rate_i): energy part everywhere, delay part on the active stream
    k = -(1.0 - beta) * state.y**2
    if t_need > 0 and np.isfinite(t_need):
        i_star = int(np.argmax(d))
        coef_t = beta if t_need <= cfg.max_delay_s else weight
        k[i_star] -= coef_t * remote[i_star] / rt[i_star] ** 2

    sqrt_m = np.sqrt(np.maximum(m, 1e-300))
    drate_dm = np.where(
        m > 0, state.z * np.sqrt(c * (1.0 + state.gamma)) / sqrt_m - state.z**2, 0.0
    )
    # b[i, j] multiplies conj(h_i) in the gradient with respect to row j
    b = (k * (-(state.z**2)))[:, None] * s
    np.fill_diagonal(b, k * drate_dm * np.diag(s))
    grad = b.T @ np.conj(h)

    pull = (1.0 - beta) * state.y * np.sqrt(remote)
    nz = norms > 0
    grad[nz] += (pull[nz] / norms[nz])[:, None] * precoders[nz]
    return grad


def solve_v(
    state: FpState,
    decision: Decision,
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    max_iter: int = 500,
) -> np.ndarray:
    """Minimize the surrogate objective over the precoders.

    Projected gradient descent on the per-stream power ball with Armijo
    backtracking (factor 0.5 from unit step); the deadline is enforced by
    an exact penalty whose weight ramps tenfold on violation.
    """
    remote = decision.split_remote_bits
    const = constant_cost(decision, realization, cfg)
    v = _project_power(np.array(decision.precoders, dtype=complex, copy=True),
                       cfg.max_precoder_power_w)
    size = math.sqrt(v.size)
    weight = max(1.0, cfg.weight_beta)

    step = 1.0
    while True:
        value, aux = _penalized_objective(
            v, realization, cfg, state, remote, const, weight
        )
        if not math.isfinite(value):
            raise DegenerateRateError("non-finite surrogate objective at the start")
        for _ in range(max_iter):
            grad = _objective_gradient(v, realization, cfg, state, remote, aux, weight)
            if not np.all(np.isfinite(grad)):
                raise DegenerateRateError("non-finite gradient in the precoder solve")
            probe = _project_power(v - grad, cfg.max_precoder_power_w)
            if np.linalg.norm(probe - v) <= PG_TOL * size:
                break
            # warm-started Armijo: grow from the last accepted step, halve on reject
            step = min(step * 2.0, 1.0)
            moved = False
            while step > 1e-18:
                candidate = _project_power(v - step * grad, cfg.max_precoder_power_w)
                cand_value, cand_aux = _penalized_objective(
                    candidate, realization, cfg, state, remote, const, weight
                )
                decrease = 1e-4 / step * np.linalg.norm(candidate - v) ** 2
                if cand_value <= value - decrease:
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
            stalled = value - cand_value <= 1e-10 * max(1.0, abs(value))
            v, value, aux = candidate, cand_value, cand_aux
            if stalled:
                break
        t_need = aux[5]
        if t_need <= cfg.max_delay_s * (1.0 + 1e-9) or weight >= PENALTY_CAP:
            return v
        weight = min(weight * PENALTY_RAMP, PENALTY_CAP)


def _closed_form_state(precoders, decision, realization, cfg) -> tuple:
    """All auxiliaries at their closed forms for the given precoders."""
    m, n, _ = _signal_and_noise(realization, precoders, cfg)
    gamma = m / n
    c = _rate_scale(cfg)
    z = np.sqrt(c * m * (1.0 + gamma)) / (m + n)
    rates = _surrogate_rates(m, n, gamma, z, cfg)
    y = update_y(precoders, rates, replace(decision, precoders=precoders), cfg)
    d = _remote_delays(decision.split_remote_bits, rates, cfg)
    t_aux = float(np.max(d, initial=0.0))
    state = FpState(
        gamma=gamma, z=z, y=y, lambda_dual=update_lambda(gamma, cfg), t_aux=t_aux
    )
    return state, rates


def solve_precoding_subproblem(
    decision: Decision,
    realization: ChannelRealization,
    cfg: ScenarioConfig,
    tol: float = 1e-6,
    max_rounds: int = 100,
    initial_precoders: np.ndarray | None = None,
) -> PrecodingSolution:
    """Alternate closed-form auxiliary updates with the precoder descent.

    Returns the best iterate seen (measured by the surrogate objective at
    self-consistent auxiliaries, which equals the true fixed-split cost).
    With no remote bits the zero precoder is optimal and returned at once.
    """
    remote = decision.split_remote_bits
    const = constant_cost(decision, realization, cfg)
    if np.all(remote <= 0):
        zeros = np.zeros_like(np.atleast_2d(decision.precoders), dtype=complex)
        i = cfg.num_vts
        state = FpState(
            gamma=np.zeros(i),
            z=np.zeros(i),
            y=np.zeros(i),
            lambda_dual=np.full(i, cfg.sat_bandwidth_hz),
            t_aux=0.0,
        )
        return PrecodingSolution(
            precoders=zeros,
            t_aux=0.0,
            fp_state=state,
            surrogate_rates=np.zeros(i),
            round_objectives=[(1.0 - cfg.weight_beta) * const],
        )

    if initial_precoders is not None:
        v = np.array(initial_precoders, dtype=complex, copy=True)
    else:
        v = matched_filter_precoders(realization, cfg.max_precoder_power_w / 2.0)
    # streams that carry bits need a nonzero starting point
    mf = matched_filter_precoders(realization, cfg.max_precoder_power_w / 2.0)
    weak = (np.sum(np.abs(v) ** 2, axis=1) <= 1e-30) & (remote > 0)
    v[weak] = mf[weak]
    v = _project_power(v, cfg.max_precoder_power_w)

    best = None
    objectives = []
    prev = None
    for _ in range(max_rounds):
        state, rates = _closed_form_state(v, decision, realization, cfg)
        value = fp_objective(
            replace(decision, precoders=v), realization, cfg, state
        )
        if best is None or value < best[0]:
            best = (value, v.copy(), state, rates)
        if prev is not None and prev - value <= tol * max(1.0, abs(prev)):
            if value <= prev:
                objectives.append(value)
            break
        objectives.append(value)
        prev = value
        v = solve_v(state, replace(decision, precoders=v), realization, cfg)

    value, v, state, rates = best
    if math.isfinite(cfg.max_delay_s) and state.t_aux > cfg.max_delay_s * (1.0 + 1e-9):
        raise InfeasibleProblem(
            f"remote delay {state.t_aux:.3g} s exceeds the {cfg.max_delay_s:.3g} s "
            "deadline even at the power cap"
        )
    return PrecodingSolution(
        precoders=v,
        t_aux=state.t_aux,
        fp_state=state,
        surrogate_rates=rates,
        round_objectives=objectives,
    )
