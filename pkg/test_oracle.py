"""
Tests for the brute-force principal direction, the comparison metrics and the baselines
"""

import math

import numpy as np
import pytest

from conftest import random_orthogonal
from opdad_system.utils import ConfigurationError, NumericalError
from opdad_system.utils.embedding_utils import build_xi, embed
from opdad_system.utils.oracle_utils import (
    angle, calibrate_threshold, dmf_principal, ed_detect, ed_feature, ed_statistics, gap, sd_detect, sd_feature,
    sd_statistics,
)


def complex_samples(rng, scales, count):
    scales = np.asarray(scales, dtype=float)
    return (rng.standard_normal((count, scales.size)) + 1j * rng.standard_normal((count, scales.size))) * scales


class TestDmfPrincipal:

    def test_planted_spike_is_recovered(self, rng):
        dimension = 16
        eigenvalues = np.ones(dimension)
        eigenvalues[0] = 5.0
        V = random_orthogonal(rng, dimension)
        samples = (rng.standard_normal((20_000, dimension)) * np.sqrt(eigenvalues)) @ V.T
        truth = dmf_principal(samples)
        assert math.degrees(angle(truth.vector, V[:, 0])) < 3.0
        assert truth.eigengap == pytest.approx(4.0, rel=0.1)
        assert not truth.degenerate
        assert truth.basis is None

    def test_real_embedded_covariance_input(self):
        xi = build_xi(np.diag([3.0, 1.0]).astype(complex))
        circular = dmf_principal(xi=xi, circular=True)
        assert circular.eigengap == pytest.approx(2.0)
        assert circular.basis.shape == (4, 2)
        assert not circular.degenerate

        plain = dmf_principal(xi=xi)
        assert plain.eigengap == pytest.approx(0.0, abs=1e-12)
        assert plain.degenerate

    def test_circular_samples_report_the_half_spectrum(self, rng):
        y = complex_samples(rng, [2.0, 1.0, 1.0], 40_000)
        truth = dmf_principal(np.array([embed(row) for row in y]), circular=True)
        np.testing.assert_allclose(truth.eigenvalues[:4], [4.0, 4.0, 1.0, 1.0], rtol=0.05)
        assert truth.eigengap == pytest.approx(3.0, rel=0.05)
        assert np.linalg.norm(truth.vector) == pytest.approx(1.0)
        np.testing.assert_allclose(truth.basis.T @ truth.basis, np.eye(2), atol=1e-12)

    def test_identity_spectrum_is_degenerate(self):
        assert dmf_principal(xi=np.eye(4)).degenerate

    def test_rejects_bad_samples(self):
        with pytest.raises(ConfigurationError):
            dmf_principal(np.ones((1, 4)))
        with pytest.raises(NumericalError):
            dmf_principal(np.zeros((5, 4)))
        with pytest.raises(ConfigurationError):
            dmf_principal(np.array([[1.0, np.nan], [0.0, 1.0]]))
        with pytest.raises(NumericalError):
            dmf_principal(xi=np.zeros((2, 2)))

    def test_to_dict(self):
        summary = dmf_principal(xi=np.diag([2.0, 1.0])).to_dict()
        assert summary == {'lambda_1': 2.0, 'eigengap': 1.0, 'degenerate': False, 'circular': False}


class TestMetrics:

    def test_sign_does_not_matter(self):
        v = np.array([0.6, 0.8, 0.0])
        assert angle(v, -v) == pytest.approx(0.0, abs=1e-7)
        assert gap(v, -v) == 0.0

    def test_orthogonal_vectors(self):
        a, b = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        assert angle(a, b) == pytest.approx(math.pi / 2)
        assert gap(a, b) == pytest.approx(math.sqrt(2))

    def test_gap_is_relative_to_the_estimate(self):
        v = np.array([0.0, 1.0])
        assert gap(2.0 * v, v) == pytest.approx(0.5)
        assert angle(2.0 * v, v) == pytest.approx(0.0)

    def test_basis_absorbs_the_complex_phase(self):
        top = np.array([1.0, 1j, 0.5]) / np.linalg.norm([1.0, 1j, 0.5])
        basis = np.column_stack([embed(top), embed(1j * top)])
        rotated = embed(np.exp(0.9j) * top)
        assert angle(rotated, basis[:, 0], basis) == pytest.approx(0.0, abs=1e-7)
        assert gap(rotated, basis[:, 0], basis) == pytest.approx(0.0, abs=1e-12)
        assert angle(rotated, basis[:, 0]) > 0.5

    def test_zero_vectors_are_rejected(self):
        with pytest.raises(ConfigurationError):
            angle(np.zeros(3), np.ones(3))
        with pytest.raises(ConfigurationError):
            gap(np.ones(3), np.zeros(3))


class TestEnergyDetector:

    def test_feature_is_the_mean_power(self):
        stream = np.array([[1 + 1j, 0], [2, 0], [0, 0]])
        assert ed_feature(stream, 0) == pytest.approx(2.0)
        assert ed_feature(stream, 1) == 0.0

    def test_feature_needs_two_blocks(self):
        with pytest.raises(ConfigurationError):
            ed_feature(np.ones((1, 3), dtype=complex), 0)

    def test_windowed_statistics(self):
        stream = np.array([[1.0], [3.0], [1.0], [1.0]], dtype=complex)
        values = ed_statistics(stream, window=2)
        assert math.isnan(values[0])
        np.testing.assert_allclose(values[1:], [5.0, 5.0, 1.0])

    def test_history_fills_the_first_window(self):
        stream = np.array([[2.0], [2.0]], dtype=complex)
        history = np.array([[0.0], [0.0], [0.0]], dtype=complex)
        values = ed_statistics(stream, window=3, history=history)
        np.testing.assert_allclose(values, [4.0 / 3.0, 8.0 / 3.0])

    def test_window_longer_than_stream_raises(self):
        with pytest.raises(ConfigurationError):
            ed_statistics(np.ones((3, 2), dtype=complex), window=10)

    def test_detect_never_fires_without_a_statistic(self):
        stream = np.array([[10.0], [10.0], [0.1]], dtype=complex)
        decisions = ed_detect(stream, threshold=1.0, window=2)
        assert decisions.tolist() == [False, True, True]

    def test_energy_rises_under_jamming(self, rng):
        quiet = complex_samples(rng, np.ones(4), 30)
        loud = complex_samples(rng, 10.0 * np.ones(4), 30)
        values = ed_statistics(np.vstack([quiet, loud]), window=10)
        assert np.nanmean(values[40:]) > 10.0 * np.nanmean(values[:30])


class TestSubspaceDimension:

    def test_rank_of_a_two_source_window(self, rng):
        sources = complex_samples(rng, np.ones(6), 2)
        window = complex_samples(rng, [1.0, 1.0], 10) @ sources
        assert sd_feature(window) == 2

    def test_zero_window_has_rank_zero(self):
        assert sd_feature(np.zeros((4, 3), dtype=complex)) == 0

    def test_single_block_is_rejected(self):
        with pytest.raises(ConfigurationError):
            sd_feature(np.ones((1, 3), dtype=complex))

    def test_extra_source_raises_the_rank(self, rng):
        users = complex_samples(rng, np.ones(8), 2)
        jammer = complex_samples(rng, np.ones(8), 1)
        clean = complex_samples(rng, [1.0, 1.0], 20) @ users
        jammed = complex_samples(rng, [1.0, 1.0, 1.0], 20) @ np.vstack([users, jammer])
        ranks = sd_statistics(np.vstack([clean, jammed]), window=5)
        assert ranks[0] == -1
        assert set(ranks[4:20]) == {2}
        assert set(ranks[25:]) == {3}
        decisions = sd_detect(np.vstack([clean, jammed]), baseline_rank=2, window=5)
        assert not decisions[:20].any()
        assert decisions[25:].all()


class TestCalibrateThreshold:

    def test_drops_missing_statistics(self):
        assert calibrate_threshold([np.nan, 1.0, 2.0, 3.0], target_pfa=0.0) == 3.0

    def test_quantile_is_an_observed_value(self):
        values = np.arange(1, 101, dtype=float)
        assert calibrate_threshold(values, target_pfa=0.05) == 96.0

    def test_no_finite_values_raise(self):
        with pytest.raises(ConfigurationError):
            calibrate_threshold([np.nan, np.nan], target_pfa=0.05)
