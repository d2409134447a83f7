"""
Tests for one-ring covariance synthesis, channel sampling and path loss
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import j0

from opdad_system.models import ChannelGeometry, CovarianceMatrix, TransmitterKind
from opdad_system.utils import ConfigurationError, NumericalError
from opdad_system.utils.channel_utils import (
    covariance_factor, dbm_to_watts, one_ring_covariance, path_loss_gain, place_transmitters,
    sample_channel, steering_vector,
)


def collinearity_residual(h, a):
    coeff = np.vdot(a, h) / np.vdot(a, a)
    return float(np.linalg.norm(h - coeff * a) / np.linalg.norm(h))


class TestOneRingCovariance:

    def test_diagonal_is_exactly_one(self):
        cov = one_ring_covariance(ChannelGeometry(0.4, math.radians(10), 50.0), 8)
        assert np.all(np.diag(cov.entries) == 1.0)

    def test_full_circle_lag_one_is_bessel_j0(self):
        cov = one_ring_covariance(ChannelGeometry(0.0, math.pi, 50.0), 4)
        assert abs(cov.entries[1, 0] - j0(math.pi)) < 1e-9
        assert cov.entries[1, 0].real == pytest.approx(-0.30424, abs=1e-5)

    def test_matches_adaptive_quadrature(self):
        mean, spread = 0.3, math.radians(12)
        cov = one_ring_covariance(ChannelGeometry(mean, spread, 80.0), 6)
        for d in range(1, 6):
            re, _ = quad(lambda t: math.cos(d * math.pi * math.sin(t)), mean - spread, mean + spread,
                         epsabs=1e-13, epsrel=1e-13)
            im, _ = quad(lambda t: -math.sin(d * math.pi * math.sin(t)), mean - spread, mean + spread,
                         epsabs=1e-13, epsrel=1e-13)
            expected = complex(re, im) / (2 * spread)
            assert abs(cov.entries[d, 0] - expected) < 1e-9
            assert abs(cov.entries[0, d] - np.conj(expected)) < 1e-9

    def test_vanishing_spread_tends_to_steering_outer_product(self):
        mean = math.pi / 6
        cov = one_ring_covariance(ChannelGeometry(mean, 1e-6, 50.0), 8)
        a = steering_vector(mean, 8)
        assert np.max(np.abs(cov.entries - np.outer(a, a.conj()))) < 1e-6

    def test_narrow_spread_concentrates_power(self):
        narrow = one_ring_covariance(ChannelGeometry(0.2, math.radians(2), 50.0), 16)
        wide = one_ring_covariance(ChannelGeometry(0.2, math.radians(30), 50.0), 16)
        assert narrow.eigenvalues()[-1] / narrow.trace > wide.eigenvalues()[-1] / wide.trace

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigurationError):
            one_ring_covariance(ChannelGeometry(0.0, 0.1, 50.0), 0)
        with pytest.raises(ConfigurationError):
            one_ring_covariance(ChannelGeometry(0.0, 0.0, 50.0), 4)
        with pytest.raises(ConfigurationError):
            one_ring_covariance(ChannelGeometry(0.0, -0.1, 50.0), 4)

    @settings(max_examples=25, deadline=None)
    @given(mean=st.floats(-math.pi / 2, math.pi / 2),
           spread=st.floats(0.005, 0.6),
           antennas=st.integers(1, 12))
    def test_hermitian_psd_unit_trace(self, mean, spread, antennas):
        cov = one_ring_covariance(ChannelGeometry(mean, spread, 50.0), antennas)
        R = cov.entries
        assert np.max(np.abs(R - R.conj().T)) <= 1e-12
        assert cov.eigenvalues()[0] >= -1e-10 * cov.trace
        assert cov.trace == pytest.approx(antennas, abs=1e-12)


class TestSampleChannel:

    def test_identity_covariance_has_unit_variance(self, rng):
        cov = CovarianceMatrix(np.eye(4, dtype=complex))
        factor = covariance_factor(cov)
        draws = np.array([sample_channel(cov, rng, factor=factor).vector for _ in range(100_000)])
        assert np.mean(np.abs(draws) ** 2) == pytest.approx(1.0, rel=0.02)

    def test_sample_covariance_converges(self, rng):
        cov = one_ring_covariance(ChannelGeometry(-0.5, math.radians(15), 50.0), 4)
        factor = covariance_factor(cov)
        n = 20_000
        draws = np.array([sample_channel(cov, rng, factor=factor).vector for _ in range(n)])
        empirical = draws.T @ draws.conj() / n
        assert np.linalg.norm(empirical - cov.entries) < 5 * 4 / math.sqrt(n)

    def test_rank_one_realizations_follow_steering_vector(self, rng):
        mean = math.pi / 6
        cov = one_ring_covariance(ChannelGeometry(mean, 1e-8, 50.0), 8)
        a = steering_vector(mean, 8)
        for block in range(1, 6):
            h = sample_channel(cov, rng, block_index=block).vector
            assert collinearity_residual(h, a) < 1e-6

    def test_same_seed_same_realization(self):
        cov = one_ring_covariance(ChannelGeometry(0.1, 0.2, 50.0), 6)
        first = sample_channel(cov, np.random.default_rng(3)).vector
        second = sample_channel(cov, np.random.default_rng(3)).vector
        np.testing.assert_array_equal(first, second)

    def test_indefinite_covariance_is_rejected(self, rng):
        cov = CovarianceMatrix(np.diag([1.0, -1.0]).astype(complex))
        with pytest.raises(NumericalError):
            sample_channel(cov, rng)


class TestPathLossAndPower:

    @pytest.mark.parametrize('distance,exponent,expected', [
        (1.0, 3.7, 1.0),
        (10.0, 3.7, 10 ** -3.7),
        (100.0, 2.0, 1e-4),
    ])
    def test_gain(self, distance, exponent, expected):
        assert path_loss_gain(distance, exponent) == pytest.approx(expected, rel=1e-12)

    def test_gain_rejects_non_positive_distance(self):
        with pytest.raises(ConfigurationError):
            path_loss_gain(0.0, 3.7)
        with pytest.raises(ConfigurationError):
            path_loss_gain(-5.0, 3.7)

    def test_dbm_conversion(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0)
        assert dbm_to_watts(0.0) == pytest.approx(1e-3)
        assert dbm_to_watts(-90.0) == pytest.approx(1e-12)


class TestPlacement:

    def test_distances_stay_in_annulus(self, rng):
        placed = place_transmitters(rng, 50, TransmitterKind.LEGITIMATE, (30.0, 400.0))
        assert all(30.0 <= g.distance <= 400.0 for g in placed)
        assert all(-math.pi / 2 <= g.mean_aoa <= math.pi / 2 for g in placed)

    def test_jammers_keep_their_distance(self, rng):
        users = place_transmitters(rng, 3, TransmitterKind.LEGITIMATE, (30.0, 400.0), angular_spread=0.05)
        jammers = place_transmitters(rng, 3, TransmitterKind.JAMMER, (100.0, 300.0), angular_spread=0.05,
                                     avoid=users, min_separation=0.1)
        assert all(not j.overlaps(u, 0.1) for j in jammers for u in users)
        assert all(j.kind is TransmitterKind.JAMMER for j in jammers)

    def test_impossible_separation_raises(self, rng):
        users = [ChannelGeometry(0.0, math.pi, 50.0)]
        with pytest.raises(ConfigurationError):
            place_transmitters(rng, 1, TransmitterKind.JAMMER, (100.0, 300.0), avoid=users,
                               min_separation=0.1, max_attempts=20)
