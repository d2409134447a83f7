"""
Detect command
Replays an observation stream file through the online detector.
"""

import logging

import numpy as np
import pandas as pd

from opdad_system.managers.detector_manager import OnlineDetector, recluster, run_online
from opdad_system.managers.experiment_manager import trial_rng
from opdad_system.managers.tracker_manager import BatchPrincipalTracker
from opdad_system.models import DetectorConfig, ExperimentConfig, Observation
from opdad_system.utils import ConfigurationError
from opdad_system.utils.stream_utils import read_stream
from .utilities import ReportUtils

logger = logging.getLogger('opdad.cli')

EVENT_COLUMNS = ['block', 'decision', 'ratio', 'deviation', 'truth']


class DetectCommand:
    """Per-block decisions for a recorded stream"""

    name = 'detect'
    help = 'Replay a stream file and print block,decision,ratio,deviation,truth'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        parser.add_argument('stream', help='observation stream file written by simulate')
        parser.add_argument('--train-blocks', type=int, required=True,
                            help='leading records that form the jamming-free training phase')
        parser.add_argument('--config', help='experiment JSON file for the detector settings')
        parser.add_argument('--epsilon', type=float, help='decision threshold (overrides the config file)')
        parser.add_argument('--burn-in', type=int, help='training blocks left out of phi0')
        parser.add_argument('--method', choices=['opdad', 'dmf'], default='opdad',
                            help='direction source: streaming tracker or batch eigendecomposition')
        parser.add_argument('--seed', type=int, default=0, help='seed of the tracker initialisation')
        parser.add_argument('--recluster', action='store_true',
                            help='add a recluster column: two-centroid k-means over all online features')
        parser.add_argument('--out', default='-', help="events CSV (default '-' for stdout)")

    def _detector_settings(self, args):
        cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
        detector = cfg.detector
        if args.epsilon is not None:
            detector = DetectorConfig.from_dict({**detector.to_dict(), 'epsilon': args.epsilon})
        burn_in = cfg.burn_in if args.burn_in is None else args.burn_in
        return detector.validate(), burn_in

    def run(self, args) -> int:
        detector_cfg, burn_in = self._detector_settings(args)
        records = read_stream(args.stream)
        n_train = args.train_blocks
        if n_train < 1 or n_train >= len(records):
            raise ConfigurationError(
                f"--train-blocks must be between 1 and {len(records) - 1} for a {len(records)}-block stream"
            )

        training = records[:n_train]
        # online blocks are numbered from 1 after the training records
        online = [Observation(complex_vector=obs.complex_vector, block_index=i + 1,
                              truth_attacked=obs.truth_attacked)
                  for i, obs in enumerate(records[n_train:])]

        tracker = None
        if args.method == 'dmf':
            tracker = BatchPrincipalTracker(2 * records[0].antenna_count, density_mode=detector_cfg.density_mode)
        detector = OnlineDetector.from_training(training, detector_cfg, trial_rng(args.seed, 0, 1),
                                                burn_in=burn_in, tracker=tracker)
        if args.recluster:
            events, features = [], []
            for obs in online:
                events.append(detector.process(obs))
                features.append(detector.last_feature)
        else:
            events = run_online(online, detector.tracker, detector)

        table = pd.DataFrame([e.to_row() for e in events], columns=EVENT_COLUMNS)
        if args.recluster:
            _, labels = recluster(features, detector.centroids)
            table['recluster'] = np.where(labels == 1, 'jamming', 'normal')
        ReportUtils.write_table(table, None if args.out == '-' else ReportUtils.output_path(args, args.out))
        jamming = int(np.sum(table['decision'] == 'jamming'))
        logger.info(f"Replayed {len(events)} blocks from {args.stream}: {jamming} jamming decisions")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(DetectCommand(app))
