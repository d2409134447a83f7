"""
Tests for the convergence bound evaluators and their Monte Carlo checks
"""

import math
from decimal import Decimal, localcontext

import numpy as np
import pytest

from conftest import random_orthogonal
from opdad_system.managers.experiment_manager import (
    spike_spectrum, theorem3_check, theorem_bound_check, verify_bounds,
)
from opdad_system.managers.tracker_manager import oja_update
from opdad_system.models import BoundInputs, SpectrumParams, TrackerState
from opdad_system.utils import ConfigurationError, HypothesisViolation, NumericalError
from opdad_system.utils.bound_utils import (
    appendixC_multiplier, multiplier_flatness, psi_residual, ratio_of_iteration, rescale, rescaled_indices,
    tan_angle_sq, theorem1_bound, theorem2_bound, theorem3_bound, theorem3_stepsize,
)

SPIKE = SpectrumParams((10.0,) + (1.0,) * 15)


class TestSpectrumParams:

    def test_from_array_sorts(self):
        spectrum = SpectrumParams.from_array([1.0, 3.0, 2.0])
        assert spectrum.eigenvalues == (3.0, 2.0, 1.0)
        assert spectrum.eigengap == 1.0

    def test_antennas_default_to_half_the_dimension(self):
        assert SPIKE.M == 8
        assert SpectrumParams((2.0, 1.0), antennas=64).M == 64

    def test_rejects_bad_spectra(self):
        with pytest.raises(ConfigurationError):
            SpectrumParams((1.0, 2.0))
        with pytest.raises(ConfigurationError):
            SpectrumParams((1.0, -0.5))
        with pytest.raises(ConfigurationError):
            SpectrumParams((1.0,))
        with pytest.raises(NumericalError):
            SpectrumParams((2.0, 2.0, 1.0))

    @pytest.mark.parametrize('kwargs', [
        {'beta': 0.0, 'xi': 0.1},
        {'beta': 0.1, 'xi': 0.0},
        {'beta': 0.1, 'xi': 0.1, 'c': 1.0},
        {'beta': 0.1, 'xi': 0.1, 'delta': 0.5},
        {'beta': 0.1, 'xi': 0.1, 'L': 0},
    ])
    def test_bound_inputs_validation(self, kwargs):
        with pytest.raises(ConfigurationError):
            BoundInputs(**kwargs)


class TestRescaledIndices:

    def test_small_example(self):
        spectrum = SpectrumParams((2.0, 1.0), antennas=8)
        assert rescaled_indices(spectrum, BoundInputs(beta=0.1, xi=0.25, c=0.5)) == (3, 14)

    def test_l_star_grows_as_beta_shrinks(self):
        spectrum = SpectrumParams((2.0, 1.0), antennas=8)
        stars = [rescaled_indices(spectrum, BoundInputs(beta=b, xi=0.25, c=0.5))[0] for b in (0.1, 0.05, 0.01, 0.001)]
        assert stars == sorted(stars) and len(set(stars)) == len(stars)

    def test_contraction_must_be_proper(self):
        with pytest.raises(ConfigurationError):
            rescaled_indices(SpectrumParams((2.0, 1.0), antennas=8), BoundInputs(beta=1.5, xi=0.25))

    def test_l_star_log_argument_must_exceed_one(self):
        with pytest.raises(ConfigurationError):
            rescaled_indices(SpectrumParams((2.0, 1.0), antennas=2), BoundInputs(beta=0.5, xi=0.25))

    def test_small_array_clamps_l_zero(self):
        # c * M = 0.8 puts log(c M) below zero
        spectrum = SpectrumParams((2.0, 1.0), antennas=2)
        assert rescaled_indices(spectrum, BoundInputs(beta=0.1, xi=0.25, c=0.4)) == (3, 1)


class TestTheorem1:

    @pytest.fixture
    def setup(self):
        return SpectrumParams((2.0,) + (1.0,) * 7), BoundInputs(beta=0.01, xi=0.25, c=0.5)

    def test_psi_residual(self, setup):
        spectrum, inputs = setup
        assert psi_residual(spectrum, inputs.beta, inputs.xi) == pytest.approx(1.54, rel=1e-12)

    def test_value_and_flags(self, setup):
        spectrum, inputs = setup
        assert rescaled_indices(spectrum, inputs) == (81, 69)
        evaluation = theorem1_bound(spectrum, inputs, 100)
        assert evaluation.value == pytest.approx(0.99 ** 62 + 1.54, rel=1e-10)
        assert evaluation.vacuous
        assert evaluation.probability_floor < 0
        assert evaluation.hypothesis_value == pytest.approx(0.4)
        assert set(evaluation.flags) == {'scaling', 'vacuous'}
        assert evaluation.to_dict()['flags'] == 'scaling;vacuous'

    def test_matches_decimal_evaluation(self, setup):
        spectrum, inputs = setup
        with localcontext() as ctx:
            ctx.prec = 40
            beta, lam1 = Decimal('0.01'), Decimal(2)
            r = lam1 ** 2 * beta / (lam1 - Decimal(1))
            noise = lam1 ** 2 / r.sqrt()
            psi = beta * sum((lam1 * Decimal(1) + noise) / (lam1 - Decimal(1)) for _ in range(7))
            expected = (1 - beta) ** (2 * (100 - 69)) + psi
        assert theorem1_bound(spectrum, inputs, 100).value == pytest.approx(float(expected), rel=1e-10)

    def test_iteration_before_l_zero_is_rejected(self, setup):
        spectrum, inputs = setup
        with pytest.raises(ConfigurationError):
            theorem1_bound(spectrum, inputs, 68)


class TestTheorem2:

    def test_prefactor(self):
        spectrum = SpectrumParams((2.0, 1.0), antennas=64)
        evaluation = theorem2_bound(spectrum, BoundInputs(beta=1e-6, xi=0.1, delta=0.1), 0)
        assert evaluation.prefactor == pytest.approx(0.4096)
        assert evaluation.value - evaluation.psi == pytest.approx(0.4096)
        assert evaluation.probability_floor == pytest.approx(0.8)
        assert evaluation.flags == []

    def test_bound_decreases_with_iterations(self):
        spectrum = SpectrumParams((2.0, 1.0), antennas=64)
        inputs = BoundInputs(beta=1e-4, xi=0.01, delta=0.4)
        values = [theorem2_bound(spectrum, inputs, l).value for l in (0, 100, 1000, 10_000)]
        assert values == sorted(values, reverse=True)

    def test_violated_hypothesis_raises_unless_forced(self):
        spectrum = SpectrumParams((2.0, 1.0), antennas=64)
        inputs = BoundInputs(beta=0.1, xi=0.1, delta=0.1)
        with pytest.raises(HypothesisViolation):
            theorem2_bound(spectrum, inputs, 10)
        assert 'hypothesis_forced' in theorem2_bound(spectrum, inputs, 10, force=True).flags

    def test_negative_iteration_is_rejected(self):
        with pytest.raises(ConfigurationError):
            theorem2_bound(SpectrumParams((2.0, 1.0), antennas=64), BoundInputs(beta=1e-6, xi=0.1), -1)


class TestTheorem3:

    def test_two_eigenvalue_example(self):
        evaluation = theorem3_bound(SpectrumParams((2.0, 1.0)), 1, 100, delta=0.1, xi=0.25, force=True)
        assert evaluation.value == pytest.approx(2 * math.log(100) / 100, rel=1e-12)
        assert 'hypothesis_forced' in evaluation.flags

    def test_spike_spectrum_meets_the_hypothesis(self):
        evaluation = theorem3_bound(SPIKE, 8, 2000, delta=0.25, xi=0.02)
        assert evaluation.hypothesis_value <= 0.25 ** 2
        assert evaluation.probability_floor == pytest.approx(0.5)
        assert evaluation.flags == []

    def test_rate_is_log_l_over_l(self):
        small = theorem3_bound(SPIKE, 8, 2000, delta=0.25, xi=0.02).value
        large = theorem3_bound(SPIKE, 8, 20_000, delta=0.25, xi=0.02).value
        expected = (math.log(20_000) / 20_000) / (math.log(2000) / 2000)
        assert large / small == pytest.approx(expected, rel=1e-12)

    def test_stepsize(self):
        assert theorem3_stepsize(SPIKE, 1000) == pytest.approx(math.log(1000) / 9000)

    def test_short_streams_are_rejected(self):
        with pytest.raises(ConfigurationError):
            theorem3_bound(SPIKE, 8, 2, delta=0.25, xi=0.02)


class TestMultiplier:

    def test_zero_delta_zeroes_both_parts(self):
        result = appendixC_multiplier(SPIKE, 8, 2000, delta=0.0, xi=0.02, force=True)
        assert result.D1 == 0.0 and result.D2 == 0.0 and result.D == 0.0

    @pytest.mark.parametrize('L', [2000, 5000, 10_000])
    @pytest.mark.parametrize('delta', [0.25, 0.4])
    def test_first_part_is_below_its_closed_form(self, L, delta):
        result = appendixC_multiplier(SPIKE, 8, L, delta=delta, xi=0.02)
        assert 0 < result.D1 <= result.D1_bound
        assert result.D == pytest.approx(result.D1 + result.D2)

    def test_multiplier_flattens_for_large_samples(self):
        slope, flat = multiplier_flatness(SPIKE, 8, [10_000, 100_000, 1_000_000], delta=0.25, xi=0.02)
        assert flat
        assert slope <= 0

    def test_flatness_needs_two_sizes(self):
        with pytest.raises(ConfigurationError):
            multiplier_flatness(SPIKE, 8, [10_000], delta=0.25, xi=0.02)

    def test_violated_hypothesis_propagates(self):
        with pytest.raises(HypothesisViolation):
            appendixC_multiplier(SPIKE, 8, 100, delta=0.25, xi=0.02)


class TestAngleHelpers:

    def test_tan_angle_sq(self):
        assert tan_angle_sq(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)
        assert tan_angle_sq(np.array([3.0, 0.0]), np.array([-1.0, 0.0])) == 0.0
        assert tan_angle_sq(np.array([0.0, 1.0]), np.array([1.0, 0.0])) == math.inf

    def test_rescale_and_ratio(self):
        V = np.array([[0.0, 1.0], [1.0, 0.0]])
        z = rescale(np.array([[3.0, 4.0]]), V)
        np.testing.assert_array_equal(z, [[4.0, 3.0]])
        assert ratio_of_iteration(np.array([2.0, 1.0, 1.0])) == pytest.approx(0.5)
        assert ratio_of_iteration(np.array([0.0, 1.0])) == math.inf

    def test_update_commutes_with_rotation(self, rng):
        dimension = 8
        V = random_orthogonal(rng, dimension)
        start = rng.standard_normal(dimension)
        plain = TrackerState(estimate=start / np.linalg.norm(start), kappa=0.7)
        rotated = TrackerState(estimate=rescale(plain.estimate[None, :], V)[0], kappa=0.7)
        for sample in rng.standard_normal((20, dimension)) * np.linspace(3.0, 1.0, dimension):
            plain = oja_update(plain, sample)
            rotated = oja_update(rotated, rescale(sample[None, :], V)[0])
            np.testing.assert_allclose(rotated.estimate, rescale(plain.estimate[None, :], V)[0], rtol=0, atol=1e-10)


class TestMonteCarloChecks:

    def test_theorem3_holds_on_a_spike(self):
        result = theorem3_check(spike_spectrum(16), L=2000, delta=0.25, xi=0.02, trials=200, seed=0)
        assert result['pass_fraction'] >= result['required_fraction']
        assert result['bound'] > 0

    def test_unknown_theorem_is_rejected(self):
        with pytest.raises(ConfigurationError):
            theorem_bound_check(4, spike_spectrum(4), BoundInputs(beta=0.01, xi=0.1), 10)

    def test_verify_bounds_table(self):
        table = verify_bounds(dimension=16, L=2000, delta=0.25, xi=0.02, trials=50, seed=1)
        assert table['theorem'].tolist() == ['theorem3', 'theorem1', 'theorem2']
        assert (table['error'] == '').all()
        assert table['bound'].notna().all()
        assert table['pass_fraction'].between(0, 1).all()
