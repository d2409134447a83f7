"""
Scenario Data Models
Defines the uplink scenario configuration, attack schedules and observations.
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional, Tuple

import numpy as np

import constants
from ..utils.validation_utils import ConfigurationError, ValidationUtils


@dataclass
class ScenarioConfig:
    """Uplink scenario parameters; field names follow the simulation table"""

    K: int = constants.USERS
    N: int = constants.JAMMERS
    M: int = constants.ANTENNAS
    L: int = constants.BLOCKS
    P_U: float = constants.USER_POWER_DBM
    P_J: float = constants.JAMMER_POWER_DBM
    noise_power: float = constants.NOISE_POWER_DBM
    window: Tuple[int, int] = (constants.WINDOW_START, constants.WINDOW_END)
    n_r: int = constants.BURST_COUNT
    schedule_mode: str = 'burst_markov'
    q_stay: float = constants.DEFAULT_Q_STAY
    path_loss_exponent: float = constants.PATH_LOSS_EXPONENT
    angular_spread: float = constants.DEFAULT_ANGULAR_SPREAD
    user_annulus: Tuple[float, float] = constants.USER_ANNULUS
    jammer_annulus: Tuple[float, float] = constants.JAMMER_ANNULUS
    min_separation: Optional[float] = None
    shared_schedule: bool = True

    def __post_init__(self):
        self.window = tuple(int(v) for v in self.window)
        self.user_annulus = tuple(float(v) for v in self.user_annulus)
        self.jammer_annulus = tuple(float(v) for v in self.jammer_annulus)

    @property
    def window_length(self) -> int:
        return self.window[1] - self.window[0] + 1

    def validate(self) -> 'ScenarioConfig':
        """Check the invariants; raises ConfigurationError"""
        # K = 0 / N = 0 are allowed for noise-only and jammer-free runs
        ValidationUtils.require(ValidationUtils.validate_count(self.K, 'K', minimum=0))
        ValidationUtils.require(ValidationUtils.validate_count(self.N, 'N', minimum=0))
        ValidationUtils.require(ValidationUtils.validate_count(self.M, 'M'))
        ValidationUtils.require(ValidationUtils.validate_count(self.L, 'L'))
        ValidationUtils.require(ValidationUtils.validate_window(self.window[0], self.window[1], self.L))
        ValidationUtils.require(ValidationUtils.validate_count(self.n_r, 'n_r', minimum=0))
        ValidationUtils.require(ValidationUtils.validate_choice(self.schedule_mode, constants.SCHEDULE_MODES,
                                                                'schedule_mode'))
        ValidationUtils.require(ValidationUtils.validate_fraction(self.q_stay, 'q_stay', inclusive=True))
        ValidationUtils.require(ValidationUtils.validate_positive(self.path_loss_exponent, 'path_loss_exponent'))
        ValidationUtils.require(ValidationUtils.validate_positive(self.angular_spread, 'angular_spread'))
        if self.n_r > self.window_length:
            raise ConfigurationError(
                f"n_r = {self.n_r} exceeds the attack window length {self.window_length}"
            )
        if self.q_stay >= 1.0 and self.schedule_mode == 'burst_markov':
            raise ConfigurationError("q_stay must be below 1 for the Markov schedule")
        for annulus, name in ((self.user_annulus, 'user_annulus'), (self.jammer_annulus, 'jammer_annulus')):
            if not 0 < annulus[0] <= annulus[1]:
                raise ConfigurationError(f"{name} must satisfy 0 < inner <= outer, got {annulus}")
        return self

    def with_updates(self, **changes) -> 'ScenarioConfig':
        """Copy with some fields replaced"""
        data = self.to_dict()
        data.update(changes)
        return ScenarioConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['window'] = list(self.window)
        data['user_annulus'] = list(self.user_annulus)
        data['jammer_annulus'] = list(self.jammer_annulus)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ScenarioConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"Unknown scenario fields: {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass
class AttackSchedule:
    """Per-jammer activity indicator over L blocks (index 0 is block 1)"""

    activity: np.ndarray
    window_start: int
    window_end: int
    burst_count: int

    def is_active(self, block_index: int) -> bool:
        return bool(self.activity[block_index - 1])

    @property
    def attacked_blocks(self) -> np.ndarray:
        """1-based indices of active blocks"""
        return np.flatnonzero(self.activity) + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'activity': self.activity.astype(int).tolist(),
            'window_start': self.window_start,
            'window_end': self.window_end,
            'burst_count': self.burst_count,
        }


@dataclass
class Observation:
    """One received block in complex (M) and real-embedded (2M) form"""

    complex_vector: np.ndarray
    block_index: int
    truth_attacked: bool = False
    real_vector: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.real_vector is None:
            self.real_vector = np.concatenate([self.complex_vector.real, self.complex_vector.imag])

    @property
    def antenna_count(self) -> int:
        return self.complex_vector.shape[0]
