"""Experiment configuration: plain ``key = value`` files with defaults.

An empty file yields the default scenario: 4 VTs, 8 SAPs, 2 MHz / 200 MHz
bandwidths, 0.1 W uplink power, 2 W precoder cap, 0.8 GHz / 20 GHz compute
rates, delay weight 0.7, -174 dBm/Hz noise density, 12 GHz carrier at
550 km, and task sizes drawn uniformly within +/-20% of 1 MB per trial.
Unknown keys, type mismatches and out-of-range values are rejected with
their line number.
"""

from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError

SCHEMES = ("proposed", "rsu_only", "saps_only", "random")
SWEEPABLE = ("num_vts", "num_saps", "task_bits", "max_precoder_power_w")


@dataclass
class ScenarioDefaults:
    """Scenario knobs before per-trial sampling."""

    num_vts: int = 4
    num_saps: int = 8
    total_bandwidth_hz: float = 2e6
    sat_bandwidth_hz: float = 200e6
    vt_tx_power_w: float = 0.1
    max_precoder_power_w: float = 2.0
    rsu_freq_hz: float = 0.8e9
    cpu_freq_hz: float = 20e9
    kappa_rsu: float = 1e-25
    kappa_sap: float = 1e-25
    weight_beta: float = 0.7
    max_delay_s: float = 300.0
    noise_density_dbm_hz: float = -174.0
    task_bits: float = 8e6            # mean task size; draws span +/-20%
    carrier_frequency_hz: float = 12e9
    antenna_factor: float = 10.0
    rician_k_db: float = 10.0
    shadow_std_db: float = 5.0
    sap_distance_km: float = 550.0
    sap_distance_jitter_km: float = 50.0
    boresight_max_deg: float = 30.0
    vt_distance_min_m: float = 50.0
    vt_distance_max_m: float = 200.0
    terrestrial_path_loss_exp: float = 3.0
    delay_aggregation: str = "sum"


@dataclass
class ExperimentSpec:
    """One batch experiment: scenario defaults plus sweep and trial plan."""

    scenario: ScenarioDefaults = field(default_factory=ScenarioDefaults)
    sweep_param: str = "num_vts"
    sweep_values: list = None
    trials: int = 20
    seed: int = 0
    schemes: tuple = SCHEMES
    output_path: str = "results.csv"
    emit_trace: bool = False

    def __post_init__(self):
        if self.sweep_values is None:
            self.sweep_values = [getattr(self.scenario, self.sweep_param)]


_INT_KEYS = {"num_vts", "num_saps", "trials", "seed"}
_POSITIVE_KEYS = {
    "num_vts",
    "num_saps",
    "total_bandwidth_hz",
    "sat_bandwidth_hz",
    "vt_tx_power_w",
    "max_precoder_power_w",
    "rsu_freq_hz",
    "cpu_freq_hz",
    "kappa_rsu",
    "kappa_sap",
    "max_delay_s",
    "task_bits",
    "carrier_frequency_hz",
    "antenna_factor",
    "sap_distance_km",
    "vt_distance_min_m",
    "vt_distance_max_m",
    "terrestrial_path_loss_exp",
    "trials",
}
_NONNEG_KEYS = {"shadow_std_db", "rician_k_db", "sap_distance_jitter_km", "boresight_max_deg"}


def _parse_number(key: str, raw: str, line: int):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key} expects a number, got {raw!r}", line)
    if key in _INT_KEYS:
        if value != int(value):
            raise ConfigError(f"{key} expects an integer, got {raw!r}", line)
        return int(value)
    return value


def _parse_bool(key: str, raw: str, line: int) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key} expects true/false, got {raw!r}", line)


def _validate_range(key: str, value, line: int):
    if key == "weight_beta" and not 0.0 <= value <= 1.0:
        raise ConfigError(f"weight_beta must lie in [0, 1], got {value}", line)
    if key in _POSITIVE_KEYS and value <= 0:
        raise ConfigError(f"{key} must be positive, got {value}", line)
    if key in _NONNEG_KEYS and value < 0:
        raise ConfigError(f"{key} must be nonnegative, got {value}", line)
    if key == "boresight_max_deg" and value >= 90.0:
        raise ConfigError(f"boresight_max_deg must be below 90, got {value}", line)
    if key == "seed" and value < 0:
        raise ConfigError(f"seed must be nonnegative, got {value}", line)


def parse_config(text: str) -> ExperimentSpec:
    """Parse config text into a fully populated :class:`ExperimentSpec`."""
    scenario_keys = {f.name for f in fields(ScenarioDefaults)}
    scenario = ScenarioDefaults()
    spec_kwargs = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if not raw:
            raise ConfigError(f"{key} has no value", lineno)

        if key in scenario_keys:
            if key == "delay_aggregation":
                if raw not in ("sum", "max"):
                    raise ConfigError(
                        f"delay_aggregation must be 'sum' or 'max', got {raw!r}", lineno
                    )
                scenario.delay_aggregation = raw
            else:
                value = _parse_number(key, raw, lineno)
                _validate_range(key, value, lineno)
                setattr(scenario, key, value)
        elif key == "sweep_param":
            if raw not in SWEEPABLE:
                raise ConfigError(
                    f"sweep_param must be one of {', '.join(SWEEPABLE)}, got {raw!r}",
                    lineno,
                )
            spec_kwargs["sweep_param"] = raw
        elif key == "sweep_values":
            values = []
            for token in raw.split(","):
                token = token.strip()
                if token:
                    values.append(_parse_number("sweep_values", token, lineno))
            if not values:
                raise ConfigError("sweep_values must be a nonempty list", lineno)
            spec_kwargs["sweep_values"] = values
        elif key in ("trials", "seed"):
            value = _parse_number(key, raw, lineno)
            _validate_range(key, value, lineno)
            spec_kwargs[key] = value
        elif key == "schemes":
            names = tuple(t.strip() for t in raw.split(",") if t.strip())
            if not names:
                raise ConfigError("schemes must be a nonempty list", lineno)
            for name in names:
                if name not in SCHEMES:
                    raise ConfigError(
                        f"unknown scheme {name!r}; valid: {', '.join(SCHEMES)}", lineno
                    )
            spec_kwargs["schemes"] = names
        elif key == "output_path":
            spec_kwargs["output_path"] = raw
        elif key == "emit_trace":
            spec_kwargs["emit_trace"] = _parse_bool(key, raw, lineno)
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)

    if scenario.vt_distance_min_m > scenario.vt_distance_max_m:
        raise ConfigError("vt_distance_min_m exceeds vt_distance_max_m")
    spec = ExperimentSpec(scenario=scenario, **spec_kwargs)
    if "sweep_values" in spec_kwargs and spec.sweep_param in ("num_vts", "num_saps"):
        coerced = []
        for v in spec.sweep_values:
            if float(v) != int(v):
                raise ConfigError(f"{spec.sweep_param} sweep values must be integers")
            coerced.append(int(v))
        spec.sweep_values = coerced
    return spec


def load_config(path: str) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())
