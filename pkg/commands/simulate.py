"""
Simulate command
Writes an observation stream file with its ground-truth label sidecar.
"""

import logging

from opdad_system.managers.experiment_manager import trial_rng
from opdad_system.managers.scenario_manager import ScenarioGenerator, build_schedule, training_phase
from opdad_system.models import Observation
from opdad_system.utils.stream_utils import labels_path, write_stream
from .utilities import ReportUtils

logger = logging.getLogger('opdad.cli')


class SimulateCommand:
    """Generate one trial's received-signal stream"""

    name = 'simulate'
    help = 'Write an observation stream file (plus <file>.labels.csv)'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        ReportUtils.add_common_arguments(parser, trials=False)
        parser.add_argument('--trial', type=int, default=0, help='trial index to draw (default 0)')
        parser.add_argument('--train-blocks', type=int, default=0,
                            help='prepend this many jamming-free training blocks')

    def run(self, args) -> int:
        cfg = ReportUtils.load_experiment(args)
        scenario = cfg.scenario
        rng = trial_rng(cfg.seed, args.trial, 0)
        generator = ScenarioGenerator(scenario, rng)

        observations = []
        if args.train_blocks > 0:
            observations.extend(training_phase(scenario, rng, args.train_blocks, generator))
        schedules = build_schedule(scenario, rng)
        observations.extend(generator.stream(schedules))

        # file records are numbered 1..n in order
        records = [Observation(complex_vector=obs.complex_vector, block_index=i + 1,
                               truth_attacked=obs.truth_attacked)
                   for i, obs in enumerate(observations)]
        path = ReportUtils.output_path(args, f'stream_seed{cfg.seed}_trial{args.trial}.opdd')
        write_stream(path, records)
        attacked = sum(obs.truth_attacked for obs in records)
        print(f"Wrote {len(records)} blocks (M={scenario.M}, {attacked} attacked) to {path}")
        print(f"Labels: {labels_path(path)}")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(SimulateCommand(app))
