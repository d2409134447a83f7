"""
OPDAD System Managers
Handles scenario generation, tracking, detection and experiment orchestration.
"""

from .scenario_manager import ScenarioGenerator, build_schedule, generate_block, training_phase
from .tracker_manager import BatchPrincipalTracker, PrincipalDirectionTracker, oja_update
from .detector_manager import OnlineDetector, calibrate_epsilon, classify_block, init_centroid, recluster, run_online
from .experiment_manager import bench, oracle_compare, run_trial, sweep, verify_bounds

__all__ = [
    'ScenarioGenerator',
    'build_schedule',
    'generate_block',
    'training_phase',
    'BatchPrincipalTracker',
    'PrincipalDirectionTracker',
    'oja_update',
    'OnlineDetector',
    'calibrate_epsilon',
    'classify_block',
    'init_centroid',
    'recluster',
    'run_online',
    'bench',
    'oracle_compare',
    'run_trial',
    'sweep',
    'verify_bounds',
]
