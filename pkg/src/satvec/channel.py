"""Seed-driven channel generation for the RSU-to-satellite and VT-to-RSU links.

Satellite links combine three large-scale attenuations in dB -- free-space
path loss, log-normal shadowing, and a boresight-angle antenna loss -- with
Rician small-scale fading on top. Terrestrial links are modelled as a
distance power law times a unit-mean exponential (Rayleigh-power) gain.

All randomness flows through explicit generators derived from the seed in
:class:`FadingParams`, so identical parameters reproduce identical
realizations byte for byte.
"""

import math
from dataclasses import dataclass

import numpy as np

from .rng import substream

LN2 = math.log(2.0)


@dataclass
class GeometryParams:
    """Static geometry of one scenario snapshot.

    ``sap_distances_m`` and ``boresight_angles_rad`` are (I, K) matrices:
    one entry per (data stream, satellite access point) pair.
    """

    carrier_frequency_hz: float
    sap_distances_m: np.ndarray
    boresight_angles_rad: np.ndarray
    antenna_factor: float
    vt_distances_m: np.ndarray
    terrestrial_path_loss_exp: float

    def __post_init__(self):
        self.sap_distances_m = np.asarray(self.sap_distances_m, dtype=float)
        self.boresight_angles_rad = np.asarray(self.boresight_angles_rad, dtype=float)
        self.vt_distances_m = np.asarray(self.vt_distances_m, dtype=float)
        if self.carrier_frequency_hz <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.antenna_factor <= 0:
            raise ValueError("antenna factor must be positive")
        if self.sap_distances_m.shape != self.boresight_angles_rad.shape:
            raise ValueError("SAP distance and boresight matrices must share a shape")
        if np.any(self.sap_distances_m <= 0) or np.any(self.vt_distances_m <= 0):
            raise ValueError("all distances must be strictly positive")
        if np.any(self.boresight_angles_rad < 0) or np.any(
            self.boresight_angles_rad >= math.pi / 2
        ):
            raise ValueError("boresight angles must lie in [0, pi/2)")

    @property
    def num_streams(self) -> int:
        return self.sap_distances_m.shape[0]

    @property
    def num_saps(self) -> int:
        return self.sap_distances_m.shape[1]


@dataclass
class FadingParams:
    """Stochastic fading parameters plus the seed that drives the draws."""

    rician_k_linear: float
    shadow_std_db: float
    seed: int

    def __post_init__(self):
        if self.rician_k_linear < 0:
            raise ValueError("Rician K factor must be nonnegative")
        if self.shadow_std_db < 0:
            raise ValueError("shadowing std must be nonnegative")


@dataclass
class ChannelRealization:
    """One drawn channel state.

    ``sat_channels`` is the (I, K) complex matrix whose row i is the channel
    of data stream i across the K SAPs. ``terr_gains`` is the length-I
    composite terrestrial gain (fading times the distance power law).
    """

    sat_channels: np.ndarray
    terr_gains: np.ndarray

    def __post_init__(self):
        self.sat_channels = np.asarray(self.sat_channels, dtype=complex)
        self.terr_gains = np.asarray(self.terr_gains, dtype=float)
        if not np.all(np.isfinite(self.sat_channels)):
            raise ValueError("satellite channels must be finite")
        if np.any(self.terr_gains <= 0):
            raise ValueError("terrestrial gains must be strictly positive")


def path_loss_db(carrier_hz, distance_m):
    """Free-space path loss in dB.

    The 32.45 constant fixes the internal units to MHz and km; inputs are
    SI and converted here. Accepts scalars or arrays.
    """
    carrier_hz = np.asarray(carrier_hz, dtype=float)
    distance_m = np.asarray(distance_m, dtype=float)
    if np.any(carrier_hz <= 0) or np.any(distance_m <= 0):
        raise ValueError("carrier frequency and distance must be positive")
    out = 32.45 + 20.0 * np.log10(carrier_hz / 1e6) + 20.0 * np.log10(distance_m / 1e3)
    return float(out) if out.ndim == 0 else out


def antenna_loss_db(angle_rad, sharpness):
    """Boresight antenna loss in dB (negative at small angles, i.e. a gain).

    The pattern is cos(angle)^sharpness scaled so that the on-axis gain is
    32*ln(2) / (2 * (2*arccos(0.5**(1/sharpness)))**2), the standard
    narrow-beam gain approximation; the denominator angle is the full
    half-power beamwidth of the cosine pattern.
    """
    angle_rad = np.asarray(angle_rad, dtype=float)
    if sharpness <= 0:
        raise ValueError("sharpness must be positive")
    if np.any(angle_rad < 0) or np.any(angle_rad >= math.pi / 2):
        raise ValueError("boresight angle must lie in [0, pi/2)")
    half_power = 2.0 * math.acos(0.5 ** (1.0 / sharpness))
    boresight_gain = 32.0 * LN2 / (2.0 * half_power**2)
    out = -10.0 * np.log10(np.cos(angle_rad) ** sharpness * boresight_gain)
    return float(out) if out.ndim == 0 else out


def large_scale_linear(
    geometry: GeometryParams, fading: FadingParams, rng: np.random.Generator
) -> np.ndarray:
    """(I, K) linear large-scale attenuation 10**(-(dist+shadow+antenna)/10).

    Shadowing is drawn i.i.d. Normal(0, shadow_std_db**2) in dB from ``rng``.
    """
    dist_db = path_loss_db(geometry.carrier_frequency_hz, geometry.sap_distances_m)
    ant_db = antenna_loss_db(geometry.boresight_angles_rad, geometry.antenna_factor)
    shad_db = rng.normal(0.0, fading.shadow_std_db, size=geometry.sap_distances_m.shape)
    return 10.0 ** (-(dist_db + shad_db + ant_db) / 10.0)


def small_scale_channel(scale_linear, rician_k, rng: np.random.Generator):
    """Rician fading sample(s) with mean power equal to ``scale_linear``.

    The line-of-sight part is a unit phasor with phase uniform on [-pi, pi];
    the diffuse part is circularly symmetric complex normal with unit
    variance. The two are mixed with weights K/(K+1) and 1/(K+1).
    """
    scale_linear = np.asarray(scale_linear, dtype=float)
    if np.any(scale_linear <= 0):
        raise ValueError("large-scale level must be positive")
    if rician_k < 0:
        raise ValueError("Rician K factor must be nonnegative")
    shape = scale_linear.shape
    phase = rng.uniform(-math.pi, math.pi, size=shape)
    los = np.exp(1j * phase)
    nlos = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    mix = math.sqrt(rician_k / (rician_k + 1.0)) * los + math.sqrt(
        1.0 / (rician_k + 1.0)
    ) * nlos
    out = np.sqrt(scale_linear) * mix
    return complex(out) if out.ndim == 0 else out


def realize_channels(geometry: GeometryParams, fading: FadingParams) -> ChannelRealization:
    """Draw one full channel state for a scenario snapshot.

    Three independent substreams are used (shadowing, satellite small-scale,
    terrestrial fading) so that each quantity is reproducible on its own.
    """
    num_vts = geometry.vt_distances_m.shape[0]
    if geometry.num_streams != num_vts:
        raise ValueError(
            f"SAP geometry has {geometry.num_streams} streams "
            f"but there are {num_vts} VT distances"
        )
    scale = large_scale_linear(geometry, fading, substream(fading.seed, "sat-shadow"))
    sat = small_scale_channel(
        scale, fading.rician_k_linear, substream(fading.seed, "sat-smallscale")
    )
    fade = substream(fading.seed, "terr-fading").standard_exponential(num_vts)
    terr = fade * geometry.vt_distances_m ** (-geometry.terrestrial_path_loss_exp)
    return ChannelRealization(sat_channels=np.atleast_2d(sat), terr_gains=terr)
