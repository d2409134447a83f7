"""
Detector Data Models
Defines the detector configuration, class centroids and per-block detection events.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

import constants
from ..utils.validation_utils import ConfigurationError, ValidationUtils


class Decision(str, Enum):
    NORMAL = 'normal'
    JAMMING = 'jamming'


@dataclass
class DetectorConfig:
    """Decision threshold, false-alarm target and bootstrap rule"""

    epsilon: float = constants.EPSILON
    target_pfa: float = constants.TARGET_PFA
    bootstrap_dev_multiplier: float = constants.BOOTSTRAP_DEV_MULTIPLIER
    density_mode: str = 'phase'
    init: str = 'uniform'

    def validate(self) -> 'DetectorConfig':
        ValidationUtils.require(ValidationUtils.validate_positive(self.epsilon, 'epsilon'))
        ValidationUtils.require(ValidationUtils.validate_fraction(self.target_pfa, 'target_pfa'))
        ValidationUtils.require(ValidationUtils.validate_positive(self.bootstrap_dev_multiplier,
                                                                  'bootstrap_dev_multiplier'))
        ValidationUtils.require(ValidationUtils.validate_choice(self.density_mode, ['ratio', 'phase'],
                                                                'density_mode'))
        ValidationUtils.require(ValidationUtils.validate_choice(self.init, ['uniform', 'first_observation'], 'init'))
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epsilon': self.epsilon,
            'target_pfa': self.target_pfa,
            'bootstrap_dev_multiplier': self.bootstrap_dev_multiplier,
            'density_mode': self.density_mode,
            'init': self.init,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DetectorConfig':
        unknown = set(data) - set(cls().to_dict())
        if unknown:
            raise ConfigurationError(f"Unknown detector fields: {', '.join(sorted(unknown))}")
        return cls(**data)


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


@dataclass
class Centroids:
    """
    Normal (phi0) and jamming (phi1) class centroids.

    The running means are kept unnormalised so they equal the batch mean of
    the assigned features; phi0/phi1 are their normalised versions.
    """

    mean0: np.ndarray
    count0: int
    sigma_train: float = 0.0
    mean1: Optional[np.ndarray] = None
    count1: int = 0

    @property
    def phi0(self) -> np.ndarray:
        return _unit(self.mean0)

    @property
    def phi1(self) -> Optional[np.ndarray]:
        return None if self.mean1 is None else _unit(self.mean1)

    @property
    def has_jamming_class(self) -> bool:
        return self.mean1 is not None

    def absorb_normal(self, values: np.ndarray):
        self.count0 += 1
        self.mean0 = self.mean0 + (values - self.mean0) / self.count0

    def absorb_jamming(self, values: np.ndarray):
        if self.mean1 is None:
            self.mean1 = values.copy()
            self.count1 = 1
            return
        self.count1 += 1
        self.mean1 = self.mean1 + (values - self.mean1) / self.count1

    def drop_jamming_class(self):
        self.mean1 = None
        self.count1 = 0

    def snapshot(self) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        phi1 = self.phi1
        return self.phi0.copy(), None if phi1 is None else phi1.copy()

    def copy(self) -> 'Centroids':
        return Centroids(mean0=self.mean0.copy(), count0=self.count0, sigma_train=self.sigma_train,
                         mean1=None if self.mean1 is None else self.mean1.copy(), count1=self.count1)


@dataclass
class DetectionEvent:
    """
    Decision for one block.

    `ratio` is |f - phi0| / |f - phi1| once phi1 exists; during bootstrap it is
    the deviation over its threshold, so values above 1 flagged the block.
    """

    block_index: int
    decision: Decision
    ratio: float
    deviation: float
    truth_attacked: bool = False
    bootstrap: bool = False
    centroids: Optional[Tuple[np.ndarray, Optional[np.ndarray]]] = field(default=None, repr=False)

    @property
    def is_jamming(self) -> bool:
        return self.decision is Decision.JAMMING

    def to_row(self) -> Dict[str, Any]:
        return {
            'block': self.block_index,
            'decision': self.decision.value,
            'ratio': self.ratio,
            'deviation': self.deviation,
            'truth': int(self.truth_attacked),
        }
