"""
Tracker Manager
Online principal-direction tracking with the Oja-type update and kappa / l stepsize.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..models.tracker_model import DensityFeature, TrackerState
from ..models.oracle_model import PrincipalDirectionTruth
from ..utils.embedding_utils import align, canonical_phase, density_feature, embed, phase_align, unembed
from ..utils.oracle_utils import dmf_principal
from ..utils.validation_utils import ConfigurationError, NumericalError, ValidationUtils

logger = logging.getLogger('opdad.tracker')

INIT_MODES = ['uniform', 'first_observation']


def oja_increment(v: np.ndarray, sample: np.ndarray, beta: float) -> np.ndarray:
    """beta (s s^T - (v^T s s^T v / |v|^2) I) v"""
    projection = float(v @ sample)
    return beta * (projection * sample - (projection * projection / float(v @ v)) * v)


def oja_update(state: TrackerState, sample: np.ndarray) -> TrackerState:
    """
    One update with stepsize kappa / l, followed by renormalisation.

    Returns a new state; the input state is left untouched.
    """
    if sample.shape != state.estimate.shape:
        raise ConfigurationError(f"Sample has shape {sample.shape}, expected {state.estimate.shape}")
    if not np.all(np.isfinite(sample)):
        raise NumericalError(f"Non-finite sample at iteration {state.iteration + 1}")

    v = state.estimate + oja_increment(state.estimate, sample, state.stepsize)
    norm = np.linalg.norm(v)
    if not math.isfinite(norm) or norm == 0:
        raise NumericalError(f"Tracker estimate collapsed at iteration {state.iteration + 1}")
    return TrackerState(estimate=v / norm, iteration=state.iteration + 1,
                        kappa=state.kappa, eigengap_hint=state.eigengap_hint)


def uniform_unit_vector(rng: np.random.Generator, dimension: int) -> np.ndarray:
    """Uniform draw from the unit sphere of R^dimension"""
    v = rng.standard_normal(dimension)
    return v / np.linalg.norm(v)


def training_principal(training_samples: Sequence[np.ndarray], circular: bool = True) -> PrincipalDirectionTruth:
    """Principal direction and eigengap of the training sample covariance"""
    samples = np.atleast_2d(np.asarray(training_samples, dtype=float))
    if samples.shape[0] == 1:
        # a single block still defines a rank-one covariance
        samples = np.vstack([samples, samples])
    truth = dmf_principal(samples, circular=circular)
    if truth.degenerate or truth.eigengap <= 0:
        raise NumericalError("Training covariance has no eigengap; pass an explicit kappa")
    return truth


def estimate_kappa(training_samples: Sequence[np.ndarray], circular: bool = True) -> float:
    """kappa = 1 / eigengap of the training sample covariance"""
    return 1.0 / training_principal(training_samples, circular).eigengap


def _anchored_feature(estimate: np.ndarray, reference: Optional[np.ndarray], block_index: int,
                      mode: str) -> DensityFeature:
    if reference is None:
        return density_feature(estimate, block_index=block_index, mode=mode)
    return density_feature(phase_align(estimate, reference), block_index=block_index, mode=mode,
                           reference=reference)


def _checked_reference(reference: np.ndarray, dimension: int) -> np.ndarray:
    reference = np.asarray(reference, dtype=float)
    if reference.shape != (dimension,):
        raise ConfigurationError(f"Phase reference has shape {reference.shape}, expected ({dimension},)")
    ValidationUtils.require(ValidationUtils.validate_nonzero_vector(reference, 'phase reference'))
    return reference / np.linalg.norm(reference)


class PrincipalDirectionTracker:
    """Single-owner tracker; feed observations strictly in block order"""

    def __init__(self, dimension: int, kappa: Optional[float] = None, rng: Optional[np.random.Generator] = None,
                 init: str = 'uniform', eigengap_hint: Optional[float] = None, density_mode: str = 'ratio'):
        ValidationUtils.require(ValidationUtils.validate_count(dimension, 'dimension', minimum=2))
        ValidationUtils.require(ValidationUtils.validate_choice(init, INIT_MODES, 'init'))
        if kappa is None:
            if eigengap_hint is None:
                raise ConfigurationError("Either kappa or eigengap_hint is required")
            ValidationUtils.require(ValidationUtils.validate_positive(eigengap_hint, 'eigengap_hint'))
            kappa = 1.0 / eigengap_hint
        if kappa < 0 or not math.isfinite(kappa):
            raise ConfigurationError(f"kappa must be finite and non-negative, got {kappa}")

        self.dimension = dimension
        self.init = init
        self.density_mode = density_mode
        self.rng = rng if rng is not None else np.random.default_rng()
        self.state: Optional[TrackerState] = None
        self._kappa = float(kappa)
        self._eigengap_hint = eigengap_hint
        self.phase_reference: Optional[np.ndarray] = None
        if init == 'uniform':
            self.reset(uniform_unit_vector(self.rng, dimension))

    @classmethod
    def from_training(cls, training_samples: Sequence[np.ndarray], rng: Optional[np.random.Generator] = None,
                      init: str = 'uniform', density_mode: str = 'ratio') -> 'PrincipalDirectionTracker':
        """
        Tracker whose kappa comes from the training phase covariance.

        The training principal direction, rotated by canonical_phase, becomes
        the phase reference of every later density feature.
        """
        truth = training_principal(training_samples)
        kappa = 1.0 / truth.eigengap
        dimension = np.asarray(training_samples[0]).shape[0]
        logger.debug(f"Tracker kappa from {len(training_samples)} training blocks: {kappa:.4e}")
        tracker = cls(dimension, kappa=kappa, rng=rng, init=init, density_mode=density_mode)
        tracker.set_phase_reference(canonical_phase(truth.vector, density_mode))
        return tracker

    @property
    def kappa(self) -> float:
        return self._kappa

    @property
    def estimate(self) -> np.ndarray:
        if self.state is None:
            raise ConfigurationError("Tracker has not seen an observation yet")
        return self.state.estimate

    def reset(self, estimate: np.ndarray):
        ValidationUtils.require(ValidationUtils.validate_nonzero_vector(estimate, 'estimate'))
        self.state = TrackerState(estimate=estimate / np.linalg.norm(estimate), iteration=0,
                                  kappa=self._kappa, eigengap_hint=self._eigengap_hint)

    def update(self, sample: np.ndarray) -> np.ndarray:
        """Consume one embedded observation and return the new unit estimate"""
        if self.state is None:
            # first-observation start: v is parallel to s, so the update below is a fixed point
            if not np.any(sample):
                raise NumericalError("First observation is zero; cannot initialise from it")
            self.reset(sample)
        self.state = oja_update(self.state, sample)
        return self.state.estimate

    def set_phase_reference(self, reference: np.ndarray):
        """Fix the complex phase of later features by aligning each estimate to `reference`"""
        self.phase_reference = _checked_reference(reference, self.dimension)

    def feature(self, block_index: int = 0) -> DensityFeature:
        return _anchored_feature(self.estimate, self.phase_reference, block_index, self.density_mode)


class BatchPrincipalTracker:
    """
    Brute-force counterpart of the tracker: the top eigenvector of the
    cumulative complex sample covariance, recomputed every block.

    The free complex phase is fixed by projecting the phase reference, or
    without one the previous estimate, onto the new principal eigenspace, so
    consecutive density features are comparable.
    """

    def __init__(self, dimension: int, density_mode: str = 'ratio'):
        ValidationUtils.require(ValidationUtils.validate_count(dimension, 'dimension', minimum=2))
        self.dimension = dimension
        self.density_mode = density_mode
        self._second_moment = np.zeros((dimension // 2, dimension // 2), dtype=complex)
        self._estimate: Optional[np.ndarray] = None
        self.iteration = 0
        self.phase_reference: Optional[np.ndarray] = None

    @property
    def estimate(self) -> np.ndarray:
        if self._estimate is None:
            raise ConfigurationError("Tracker has not seen an observation yet")
        return self._estimate

    def update(self, sample: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(sample)):
            raise NumericalError(f"Non-finite sample at iteration {self.iteration + 1}")
        y = unembed(sample)
        self._second_moment += np.outer(y, y.conj())
        self.iteration += 1

        _, vectors = np.linalg.eigh(self._second_moment)
        top = vectors[:, -1]
        basis = np.column_stack([embed(top), embed(1j * top)])
        anchor = self.phase_reference if self.phase_reference is not None else self._estimate
        self._estimate = basis[:, 0] if anchor is None else align(basis, anchor)
        return self._estimate

    def set_phase_reference(self, reference: np.ndarray):
        """Align every estimate to a fixed reference instead of the previous estimate"""
        self.phase_reference = _checked_reference(reference, self.dimension)

    def feature(self, block_index: int = 0) -> DensityFeature:
        return _anchored_feature(self.estimate, self.phase_reference, block_index, self.density_mode)
