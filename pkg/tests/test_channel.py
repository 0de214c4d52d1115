import math

import numpy as np
import pytest

from satvec.channel import (
    ChannelRealization,
    FadingParams,
    GeometryParams,
    antenna_loss_db,
    large_scale_linear,
    path_loss_db,
    realize_channels,
    small_scale_channel,
)
from satvec.rng import substream


def make_geometry(num_vts=2, num_saps=3, **overrides):
    params = dict(
        carrier_frequency_hz=12e9,
        sap_distances_m=np.full((num_vts, num_saps), 550e3),
        boresight_angles_rad=np.full((num_vts, num_saps), 0.2),
        antenna_factor=10.0,
        vt_distances_m=np.full(num_vts, 100.0),
        terrestrial_path_loss_exp=3.0,
    )
    params.update(overrides)
    return GeometryParams(**params)


class TestPathLoss:
    def test_ku_band_leo_anchor(self):
        assert path_loss_db(12e9, 550e3) == pytest.approx(168.841, abs=0.01)

    def test_unit_point(self):
        # 1 MHz at 1 km: both log terms vanish
        assert path_loss_db(1e6, 1e3) == pytest.approx(32.45, abs=1e-12)

    def test_doubling_distance_adds_six_db(self):
        base = path_loss_db(2e9, 100e3)
        assert path_loss_db(2e9, 200e3) - base == pytest.approx(
            20 * math.log10(2), abs=1e-9
        )

    def test_monotone_in_distance_and_frequency(self):
        d = np.linspace(100e3, 2000e3, 50)
        losses = path_loss_db(12e9, d)
        assert np.all(np.diff(losses) > 0)
        f = np.linspace(1e9, 30e9, 50)
        assert np.all(np.diff(path_loss_db(f, 550e3)) > 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            path_loss_db(0.0, 1e3)
        with pytest.raises(ValueError):
            path_loss_db(1e9, -1.0)


class TestAntennaLoss:
    def test_boresight_anchor(self):
        assert antenna_loss_db(0.0, 10.0) == pytest.approx(-13.11, abs=0.02)

    def test_half_power_angle_is_three_db(self):
        eta = 10.0
        theta_hp = math.acos(0.5 ** (1.0 / eta))
        delta = antenna_loss_db(theta_hp, eta) - antenna_loss_db(0.0, eta)
        assert delta == pytest.approx(10 * math.log10(2), abs=1e-9)

    def test_sharper_pattern_loses_more_off_axis(self):
        # far off axis the cos^eta rolloff dominates the growing peak gain
        losses = [antenna_loss_db(1.2, eta) for eta in (2.0, 5.0, 10.0, 20.0)]
        assert np.all(np.diff(losses) > 0)
        # the normalized pattern itself always narrows with eta
        patterns = [math.cos(0.5) ** eta for eta in (2.0, 5.0, 10.0, 20.0)]
        assert np.all(np.diff(patterns) < 0)

    def test_monotone_in_angle(self):
        angles = np.linspace(0.0, math.pi / 2 - 1e-3, 100)
        assert np.all(np.diff(antenna_loss_db(angles, 10.0)) > 0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            antenna_loss_db(math.pi / 2, 10.0)
        with pytest.raises(ValueError):
            antenna_loss_db(0.1, 0.0)


class TestLargeScale:
    def test_no_shadowing_reduces_to_deterministic(self):
        geom = make_geometry(boresight_angles_rad=np.zeros((2, 3)))
        fading = FadingParams(rician_k_linear=10.0, shadow_std_db=0.0, seed=1)
        got = large_scale_linear(geom, fading, substream(1, "x"))
        expected_db = path_loss_db(12e9, 550e3) + antenna_loss_db(0.0, 10.0)
        assert got == pytest.approx(np.full((2, 3), 10 ** (-expected_db / 10)))

    def test_170_db_to_linear(self):
        assert 10 ** (-170.0 / 10.0) == pytest.approx(1e-17)

    def test_seed_determinism(self):
        geom = make_geometry()
        fading = FadingParams(rician_k_linear=10.0, shadow_std_db=5.0, seed=7)
        a = large_scale_linear(geom, fading, substream(7, "s"))
        b = large_scale_linear(geom, fading, substream(7, "s"))
        assert np.array_equal(a, b)


class TestSmallScale:
    def test_pure_los_limit(self):
        h = small_scale_channel(4.0, 1e12, substream(3, "a"))
        assert abs(h) == pytest.approx(2.0, rel=1e-5)

    def test_rayleigh_power_moment(self):
        rng = substream(5, "mc")
        h = small_scale_channel(np.full(100_000, 2.5), 0.0, rng)
        assert np.mean(np.abs(h) ** 2) / 2.5 == pytest.approx(1.0, abs=0.02)

    def test_unit_power_for_any_k(self):
        for k in (0.0, 1.0, 10.0, 100.0):
            rng = substream(11, "mc", str(k))
            h = small_scale_channel(np.full(100_000, 3.0), k, rng)
            moment = np.mean(np.abs(h) ** 2)
            # mean power equals the large-scale level within 3 standard errors
            stderr = np.std(np.abs(h) ** 2) / math.sqrt(h.size)
            assert abs(moment - 3.0) <= 3 * stderr
            assert moment == pytest.approx(3.0, rel=0.02)

    def test_los_component_modulus(self):
        scale, k = 2.0, 10.0
        los = math.sqrt(scale * k / (k + 1.0))
        # with no diffuse part (k huge), |h| collapses onto the LoS modulus
        h = small_scale_channel(scale, k, substream(2, "b"))
        nlos_bound = math.sqrt(scale / (k + 1.0))
        assert abs(abs(h) - los) <= nlos_bound * 5


class TestRealize:
    def test_shapes_single_link(self):
        geom = make_geometry(num_vts=1, num_saps=1)
        fading = FadingParams(rician_k_linear=10.0, shadow_std_db=5.0, seed=3)
        out = realize_channels(geom, fading)
        assert out.sat_channels.shape == (1, 1)
        assert out.terr_gains.shape == (1,)

    def test_bitwise_determinism(self):
        geom = make_geometry()
        fading = FadingParams(rician_k_linear=10.0, shadow_std_db=5.0, seed=99)
        a = realize_channels(geom, fading)
        b = realize_channels(geom, fading)
        assert np.array_equal(a.sat_channels, b.sat_channels)
        assert np.array_equal(a.terr_gains, b.terr_gains)

    def test_zero_exponent_ignores_distance(self):
        fading = FadingParams(rician_k_linear=10.0, shadow_std_db=5.0, seed=4)
        near = realize_channels(
            make_geometry(vt_distances_m=np.array([10.0, 10.0]),
                          terrestrial_path_loss_exp=0.0),
            fading,
        )
        far = realize_channels(
            make_geometry(vt_distances_m=np.array([1000.0, 1000.0]),
                          terrestrial_path_loss_exp=0.0),
            fading,
        )
        assert np.array_equal(near.terr_gains, far.terr_gains)

    def test_dimension_mismatch(self):
        geom = make_geometry(num_vts=2, num_saps=3,
                             vt_distances_m=np.full(4, 100.0))
        fading = FadingParams(rician_k_linear=10.0, shadow_std_db=5.0, seed=3)
        with pytest.raises(ValueError):
            realize_channels(geom, fading)

    def test_validation_rejects_bad_values(self):
        with pytest.raises(ValueError):
            make_geometry(vt_distances_m=np.array([100.0, -1.0]))
        with pytest.raises(ValueError):
            make_geometry(boresight_angles_rad=np.full((2, 3), math.pi / 2))
        with pytest.raises(ValueError):
            ChannelRealization(
                sat_channels=np.full((1, 1), np.nan + 0j),
                terr_gains=np.ones(1),
            )
