"""
Detector Manager
Centroid initialisation, per-block classification and the online detection loop.
"""

import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.cluster import KMeans

import constants
from ..models.detector_model import Centroids, Decision, DetectionEvent, DetectorConfig
from ..models.scenario_model import Observation
from ..models.tracker_model import DensityFeature
from ..utils.embedding_utils import canonical_phase, embed
from ..utils.validation_utils import ConfigurationError, ValidationUtils
from .tracker_manager import PrincipalDirectionTracker, training_principal

logger = logging.getLogger('opdad.detector')

FeatureLike = Union[DensityFeature, np.ndarray]


def _values(feature: FeatureLike) -> np.ndarray:
    return feature.values if isinstance(feature, DensityFeature) else np.asarray(feature, dtype=float)


def init_centroid(training_features: Sequence[FeatureLike]) -> Centroids:
    """phi0 from the mean training feature, plus the training dispersion sigma_train"""
    if len(training_features) == 0:
        raise ConfigurationError("At least one training feature is required")
    stacked = np.vstack([_values(f) for f in training_features])
    mean = stacked.mean(axis=0)
    if not np.any(mean):
        raise ConfigurationError("Training features average to zero; phi0 is undefined")
    centroids = Centroids(mean0=mean, count0=stacked.shape[0])
    centroids.sigma_train = float(np.mean(np.linalg.norm(stacked - centroids.phi0, axis=1)))
    return centroids


def decision_ratio(values: np.ndarray, phi0: np.ndarray, phi1: np.ndarray) -> float:
    """|f - phi0| / |f - phi1|, +inf when f sits on phi1"""
    numerator = float(np.linalg.norm(values - phi0))
    denominator = float(np.linalg.norm(values - phi1))
    if denominator == 0:
        return math.inf
    return numerator / denominator


def classify_block(feature: FeatureLike, centroids: Centroids, cfg: DetectorConfig,
                   block_index: Optional[int] = None, truth_attacked: bool = False) -> DetectionEvent:
    """
    Decide one block and update the centroid of the decided class.

    With both centroids the block is normal iff the ratio is at most epsilon.
    Before phi1 exists the block is jamming iff its distance to phi0 exceeds
    bootstrap_dev_multiplier * sigma_train, and that block founds phi1.
    phi0 only moves on normal decisions. A phi1 that drifts back inside the
    bootstrap radius of phi0 is dropped and the bootstrap rule resumes.
    """
    if centroids is None or centroids.mean0 is None:
        raise ConfigurationError("Centroids are not initialised")
    values = _values(feature)
    if block_index is None:
        block_index = feature.block_index if isinstance(feature, DensityFeature) else 0

    snapshot = centroids.snapshot()
    phi0, phi1 = snapshot
    deviation = float(np.linalg.norm(values - phi0))
    threshold = cfg.bootstrap_dev_multiplier * centroids.sigma_train

    if phi1 is not None:
        ratio = decision_ratio(values, phi0, phi1)
        jamming = not ratio <= cfg.epsilon
        bootstrap = False
    else:
        jamming = deviation > threshold
        if threshold > 0:
            ratio = deviation / threshold
        else:
            ratio = math.inf if deviation > 0 else 0.0
        bootstrap = True

    if jamming:
        centroids.absorb_jamming(values)
        separation = float(np.linalg.norm(centroids.phi1 - centroids.phi0))
        if separation <= threshold:
            logger.debug(f"Block {block_index}: phi1 within {separation:.4f} of phi0, dropping the jamming class")
            centroids.drop_jamming_class()
    else:
        centroids.absorb_normal(values)

    return DetectionEvent(block_index=block_index, decision=Decision.JAMMING if jamming else Decision.NORMAL,
                          ratio=ratio, deviation=deviation, truth_attacked=truth_attacked,
                          bootstrap=bootstrap, centroids=snapshot)


def calibrate_epsilon(clean_runs: Iterable, centroids: Union[Centroids, Sequence[Centroids]],
                      target_pfa: float = constants.TARGET_PFA) -> float:
    """
    (1 - target_pfa) quantile of the decision ratio over jamming-free features.

    `centroids` must carry phi1, e.g. from a pilot jammed run. `clean_runs`
    is either a flat sequence of features or a sequence of per-run sequences;
    in the second form a list of centroids may give one pair per run.
    """
    ValidationUtils.require(ValidationUtils.validate_fraction(target_pfa, 'target_pfa', inclusive=True))

    runs = []
    flat = []
    for item in clean_runs:
        if isinstance(item, DensityFeature) or (isinstance(item, np.ndarray) and item.ndim == 1):
            flat.append(_values(item))
        else:
            runs.append([_values(f) for f in item])
    if flat:
        runs.append(flat)

    per_run = list(centroids) if isinstance(centroids, (list, tuple)) else [centroids] * len(runs)
    if len(per_run) != len(runs):
        raise ConfigurationError(f"Got {len(per_run)} centroid pairs for {len(runs)} runs")
    if not all(c.has_jamming_class for c in per_run):
        raise ConfigurationError("Calibration needs a jamming centroid from a pilot run")

    ratios = []
    for features, pair in zip(runs, per_run):
        phi0, phi1 = pair.phi0, pair.phi1
        ratios.extend(decision_ratio(f, phi0, phi1) for f in features)
    if len(ratios) < constants.MIN_CALIBRATION_BLOCKS:
        raise ConfigurationError(
            f"Calibration needs at least {constants.MIN_CALIBRATION_BLOCKS} evaluation blocks, got {len(ratios)}"
        )

    epsilon = float(np.quantile(np.asarray(ratios), 1.0 - target_pfa, method='higher'))
    logger.info(f"Calibrated epsilon {epsilon:.4f} from {len(ratios)} clean blocks at p_fa={target_pfa}")
    return epsilon


def recluster(features: Sequence[FeatureLike], centroids: Centroids,
              max_iter: int = 300) -> Tuple[Centroids, np.ndarray]:
    """
    Offline two-centroid minimisation of sum |f - phi_j|^2 started from the current centroids.

    Returns new centroids and labels (0 normal, 1 jamming). Without phi1 the
    feature farthest from phi0 seeds the jamming class.
    """
    X = np.vstack([_values(f) for f in features])
    if X.shape[0] < 2:
        raise ConfigurationError("Reclustering needs at least 2 features")
    phi0 = centroids.phi0
    phi1 = centroids.phi1
    if phi1 is None:
        phi1 = X[int(np.argmax(np.linalg.norm(X - phi0, axis=1)))]

    kmeans = KMeans(n_clusters=2, init=np.vstack([phi0, phi1]), n_init=1, max_iter=max_iter)
    labels = kmeans.fit_predict(X)

    result = Centroids(mean0=kmeans.cluster_centers_[0].copy(), count0=int(np.sum(labels == 0)),
                       sigma_train=centroids.sigma_train)
    if np.any(labels == 1):
        result.mean1 = kmeans.cluster_centers_[1].copy()
        result.count1 = int(np.sum(labels == 1))
    return result, labels


class OnlineDetector:
    """
    Tracker plus centroids for one stream.

    Per block: embed, update the direction source, build the density feature
    and classify. State does not grow with the number of blocks.
    """

    def __init__(self, tracker: PrincipalDirectionTracker, centroids: Centroids, cfg: DetectorConfig):
        self.tracker = tracker
        self.centroids = centroids
        self.cfg = cfg.validate()
        self.last_feature: Optional[DensityFeature] = None

    @classmethod
    def from_training(cls, training: Sequence[Observation], cfg: DetectorConfig, rng: np.random.Generator,
                      burn_in: int = constants.TRAINING_BURN_IN, tracker=None) -> 'OnlineDetector':
        """
        Run the training phase: the tracker sees every block, phi0 and
        sigma_train use the features after the burn-in.
        """
        cfg.validate()
        if len(training) == 0:
            raise ConfigurationError("Training phase produced no observations")
        samples = [embed(obs) for obs in training]
        if tracker is None:
            tracker = PrincipalDirectionTracker.from_training(samples, rng=rng, init=cfg.init,
                                                              density_mode=cfg.density_mode)
        elif tracker.phase_reference is None:
            truth = training_principal(samples)
            tracker.set_phase_reference(canonical_phase(truth.vector, cfg.density_mode))
        skip = min(max(burn_in, 0), len(training) - 1)
        features = []
        for i, (obs, sample) in enumerate(zip(training, samples)):
            tracker.update(sample)
            if i >= skip:
                features.append(tracker.feature(obs.block_index))
        centroids = init_centroid(features)
        logger.debug(f"phi0 from {len(features)} training features, sigma_train={centroids.sigma_train:.4e}")
        threshold = cfg.bootstrap_dev_multiplier * centroids.sigma_train
        if threshold >= constants.MAX_FEATURE_DISTANCE:
            logger.warning(f"Bootstrap threshold {threshold:.3f} reaches the largest distance between unit "
                           f"features ({constants.MAX_FEATURE_DISTANCE}); no block can found phi1")
        return cls(tracker, centroids, cfg)

    def process(self, observation: Observation) -> DetectionEvent:
        self.tracker.update(embed(observation))
        feature = self.tracker.feature(observation.block_index)
        self.last_feature = feature
        event = classify_block(feature, self.centroids, self.cfg, block_index=observation.block_index,
                               truth_attacked=observation.truth_attacked)
        logger.debug(f"Block {event.block_index}: {event.decision.value} ratio={event.ratio:.4f}")
        return event


def run_online(observations: Iterable[Observation], tracker: PrincipalDirectionTracker,
               detector_state: Union[OnlineDetector, Tuple[Centroids, DetectorConfig]]) -> List[DetectionEvent]:
    """
    One event per arriving observation, in order; each observation is touched once.
    """
    if isinstance(detector_state, OnlineDetector):
        detector = detector_state
        detector.tracker = tracker
    else:
        centroids, cfg = detector_state
        detector = OnlineDetector(tracker, centroids, cfg)

    events = [detector.process(obs) for obs in observations]
    if not events:
        raise ConfigurationError("Observation stream is empty")
    return events
