"""
OPDAD System Models
Contains data structures for channels, scenarios, tracking, detection, bounds and experiments.
"""

from .channel_model import ChannelGeometry, ChannelRealization, CovarianceMatrix, TransmitterKind
from .scenario_model import AttackSchedule, Observation, ScenarioConfig
from .tracker_model import DensityFeature, RealEmbeddedCovariance, TrackerState
from .oracle_model import PrincipalDirectionTruth
from .detector_model import Centroids, Decision, DetectionEvent, DetectorConfig
from .analysis_model import BoundEvaluation, BoundInputs, MultiplierEvaluation, SpectrumParams
from .experiment_model import ExperimentConfig, MetricsReport, SweepSpec, TrialOutcome

__all__ = [
    'ChannelGeometry',
    'ChannelRealization',
    'CovarianceMatrix',
    'TransmitterKind',
    'AttackSchedule',
    'Observation',
    'ScenarioConfig',
    'DensityFeature',
    'RealEmbeddedCovariance',
    'TrackerState',
    'PrincipalDirectionTruth',
    'Centroids',
    'Decision',
    'DetectionEvent',
    'DetectorConfig',
    'BoundEvaluation',
    'BoundInputs',
    'MultiplierEvaluation',
    'SpectrumParams',
    'ExperimentConfig',
    'MetricsReport',
    'SweepSpec',
    'TrialOutcome',
]
