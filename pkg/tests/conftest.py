import numpy as np
import pytest

from satvec.channel import ChannelRealization
from satvec.model import Decision, ScenarioConfig


def make_cfg(**overrides) -> ScenarioConfig:
    """Small unit-scale scenario; overridable field by field."""
    params = dict(
        num_vts=2,
        num_saps=3,
        total_bandwidth_hz=1.0,
        sat_bandwidth_hz=2.0,
        vt_tx_power_w=0.5,
        max_precoder_power_w=4.0,
        rsu_freq_hz=1.0,
        cpu_freq_hz=5.0,
        kappa_rsu=0.01,
        kappa_sap=0.02,
        noise_terr_w=1.0,
        noise_sat_w=0.3,
        weight_beta=0.6,
        max_delay_s=1e9,
        task_bits=np.array([2.0, 3.0]),
    )
    params.update(overrides)
    if "task_bits" not in overrides and params["num_vts"] != 2:
        params["task_bits"] = np.linspace(1.0, 2.0, params["num_vts"])
    return ScenarioConfig(**params)


def make_realization(rng: np.random.Generator, num_vts: int, num_saps: int,
                     channel_scale: float = 1.0) -> ChannelRealization:
    h = channel_scale * (
        rng.standard_normal((num_vts, num_saps))
        + 1j * rng.standard_normal((num_vts, num_saps))
    )
    return ChannelRealization(
        sat_channels=h, terr_gains=rng.uniform(0.5, 2.0, num_vts)
    )


def make_decision(cfg: ScenarioConfig, rng: np.random.Generator,
                  remote_fraction=None) -> Decision:
    if remote_fraction is None:
        remote_fraction = rng.uniform(0.0, 1.0, cfg.num_vts)
    remote = remote_fraction * cfg.task_bits
    v = 0.5 * (
        rng.standard_normal((cfg.num_vts, cfg.num_saps))
        + 1j * rng.standard_normal((cfg.num_vts, cfg.num_saps))
    )
    alpha = rng.uniform(0.2, 1.0, cfg.num_vts)
    alpha = alpha / alpha.sum()
    return Decision(
        split_remote_bits=remote,
        split_local_bits=cfg.task_bits - remote,
        precoders=v,
        alpha=alpha,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
