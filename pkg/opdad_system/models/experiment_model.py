"""
Experiment Data Models
Defines experiment configuration files, per-trial outcomes and aggregated metrics.
"""

import json
import math
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import constants
from .detector_model import DetectorConfig
from .scenario_model import ScenarioConfig
from ..utils.validation_utils import ConfigurationError, ValidationUtils


@dataclass
class SweepSpec:
    """A named parameter and the values it takes"""

    param: str
    values: List[Any]

    def to_dict(self) -> Dict[str, Any]:
        return {'param': self.param, 'values': list(self.values)}


@dataclass
class ExperimentConfig:
    """Scenario, detector and Monte Carlo settings of one experiment"""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    trials: int = 500
    seed: int = 20240601
    sweep: Optional[SweepSpec] = None
    methods: List[str] = field(default_factory=lambda: ['opdad'])
    n_train: int = constants.TRAINING_BLOCKS
    burn_in: int = constants.TRAINING_BURN_IN
    workers: int = 1

    def validate(self) -> 'ExperimentConfig':
        self.scenario.validate()
        self.detector.validate()
        ValidationUtils.require(ValidationUtils.validate_count(self.trials, 'trials'))
        ValidationUtils.require(ValidationUtils.validate_count(self.n_train, 'n_train'))
        ValidationUtils.require(ValidationUtils.validate_count(self.burn_in, 'burn_in', minimum=0))
        ValidationUtils.require(ValidationUtils.validate_count(self.seed, 'seed', minimum=0))
        if not self.methods:
            raise ConfigurationError("At least one method is required")
        for method in self.methods:
            ValidationUtils.require(ValidationUtils.validate_choice(method, constants.METHODS, 'method'))
        if self.workers == 0:
            raise ConfigurationError("workers must be non-zero (use -1 for all cores)")
        if self.sweep is not None:
            self._validate_sweep()
        return self

    def _validate_sweep(self):
        scenario_fields = {f.name for f in fields(ScenarioConfig)}
        detector_fields = set(DetectorConfig().to_dict())
        if self.sweep.param not in scenario_fields | detector_fields:
            raise ConfigurationError(f"Unknown sweep parameter {self.sweep.param!r}")
        if not self.sweep.values:
            raise ConfigurationError("Sweep needs at least one value")
        for value in self.sweep.values:
            self.at_point(value).scenario.validate()

    def at_point(self, value) -> 'ExperimentConfig':
        """Copy with the sweep parameter set to `value`"""
        param = self.sweep.param
        scenario, detector = self.scenario, self.detector
        if param in {f.name for f in fields(ScenarioConfig)}:
            scenario = scenario.with_updates(**{param: value})
        else:
            detector = DetectorConfig.from_dict({**detector.to_dict(), param: value})
        return ExperimentConfig(scenario=scenario, detector=detector, trials=self.trials, seed=self.seed,
                                sweep=None, methods=list(self.methods), n_train=self.n_train,
                                burn_in=self.burn_in, workers=self.workers)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario.to_dict(),
            'detector': self.detector.to_dict(),
            'trials': self.trials,
            'seed': self.seed,
            'sweep': self.sweep.to_dict() if self.sweep else None,
            'methods': list(self.methods),
            'n_train': self.n_train,
            'burn_in': self.burn_in,
            'workers': self.workers,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], defaults: Optional[Dict[str, Any]] = None) -> 'ExperimentConfig':
        known = {f.name for f in fields(cls)}
        data = {**(defaults or {}), **data}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"Unknown experiment fields: {', '.join(sorted(unknown))}")
        sweep = data.get('sweep')
        return cls(
            scenario=ScenarioConfig.from_dict(data.get('scenario', {})),
            detector=DetectorConfig.from_dict(data.get('detector', {})),
            trials=data.get('trials', 500),
            seed=data.get('seed', 20240601),
            sweep=SweepSpec(param=sweep['param'], values=list(sweep['values'])) if sweep else None,
            methods=list(data.get('methods', ['opdad'])),
            n_train=data.get('n_train', constants.TRAINING_BLOCKS),
            burn_in=data.get('burn_in', constants.TRAINING_BURN_IN),
            workers=data.get('workers', 1),
        )

    @classmethod
    def from_file(cls, path: str, defaults: Optional[Dict[str, Any]] = None) -> 'ExperimentConfig':
        """Load a JSON experiment file"""
        if not os.path.exists(path):
            raise ConfigurationError(f"Experiment file not found: {path}")
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Experiment file {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"Experiment file {path} must hold a JSON object")
        return cls.from_dict(data, defaults)


@dataclass
class TrialOutcome:
    """Scored result of one method on one trial"""

    method: str
    attacked: bool
    detected: bool
    delay: Optional[int]
    false_alarms: int
    clean_blocks: int
    blocks: int
    wall_time: float
    final_gap: float = math.nan
    error: Optional[str] = None

    @property
    def wall_time_per_block(self) -> float:
        return self.wall_time / self.blocks if self.blocks else math.nan


@dataclass
class MetricsReport:
    """Aggregate of one method over the trials of one configuration"""

    method: str
    trials: int
    p_miss: float
    avg_delay: float
    p_fa: float
    mean_gap: float
    wall_time_per_block: float
    p_miss_se: float = math.nan
    avg_delay_se: float = math.nan
    p_fa_se: float = math.nan
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'p_miss': self.p_miss,
            'avg_delay': self.avg_delay,
            'p_fa': self.p_fa,
            'mean_gap': self.mean_gap,
            'wall_time_per_block': self.wall_time_per_block,
            'trials': self.trials,
            'p_miss_se': self.p_miss_se,
            'avg_delay_se': self.avg_delay_se,
            'p_fa_se': self.p_fa_se,
            'error': self.error or '',
        }
