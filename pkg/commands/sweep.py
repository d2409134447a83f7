"""
Sweep command
Runs an experiment configuration over its sweep values and writes the metrics table.
"""

import logging
import math

from opdad_system.managers.experiment_manager import sweep, sweep_trend
from .utilities import ReportUtils

logger = logging.getLogger('opdad.cli')

TREND_COLUMNS = ['p_miss', 'avg_delay', 'p_fa']


class SweepCommand:
    """Monte Carlo metrics for each sweep point and method"""

    name = 'sweep'
    help = 'Run an experiment config and write p_miss, avg_delay, p_fa per sweep point'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        ReportUtils.add_common_arguments(parser)

    def run(self, args) -> int:
        cfg = ReportUtils.load_experiment(args)
        label = cfg.sweep.param if cfg.sweep else 'single point'
        logger.info(f"Sweep over {label}: {cfg.trials} trials per point, seed {cfg.seed}, workers {cfg.workers}")

        table = sweep(cfg, workers=cfg.workers)
        path = ReportUtils.output_path(args, f"sweep_{cfg.sweep.param if cfg.sweep else 'point'}.csv")
        ReportUtils.write_table(table, path)

        if cfg.sweep is not None and len(cfg.sweep.values) >= 3:
            for method in cfg.methods:
                for column in TREND_COLUMNS:
                    rho = sweep_trend(table, column, method)
                    if not math.isnan(rho):
                        logger.info(f"{method}: Spearman({cfg.sweep.param}, {column}) = {rho:+.3f}")

        failed = table[table['error'] != '']
        if len(failed):
            logger.warning(f"{len(failed)} sweep rows carry errors, see the error column")
        print(f"Wrote {len(table)} rows to {path}")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(SweepCommand(app))
