"""
Verify-bounds command
Compares the convergence bounds with Monte Carlo runs of the streaming update.
"""

import logging
import os

from opdad_system.managers.experiment_manager import potential_decay, spike_spectrum, verify_bounds
from .utilities import ReportUtils

logger = logging.getLogger('opdad.cli')

DECAY_CHECKPOINTS = [100, 200, 500, 1000, 2000, 5000]


class VerifyBoundsCommand:
    """Bound-versus-empirical tables on a spike spectrum"""

    name = 'verify-bounds'
    help = 'Write theorem,parameters,bound,empirical_mean_tan2,pass_fraction tables'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        parser.add_argument('--dim', type=int, default=16, help='real dimension of the spike spectrum')
        parser.add_argument('--L', type=int, default=2000, help='iterations per run')
        parser.add_argument('--delta', type=float, default=0.25, help='failure probability')
        parser.add_argument('--xi', type=float, default=0.02, help='exponent slack')
        parser.add_argument('--trials', type=int, default=200, help='Monte Carlo runs per theorem')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--force', action='store_true',
                            help='evaluate bounds even when their hypotheses fail')
        parser.add_argument('--decay', action='store_true',
                            help='also write the potential decay table next to the bounds table')
        parser.add_argument('--out', help='bounds CSV (default under OPDAD_OUTPUT_DIR)')

    def run(self, args) -> int:
        table = verify_bounds(dimension=args.dim, L=args.L, delta=args.delta, xi=args.xi,
                              trials=args.trials, seed=args.seed, force=args.force)
        path = ReportUtils.output_path(args, 'verify_bounds.csv')
        ReportUtils.write_table(table, path)
        for row in table.itertuples():
            logger.info(f"{row.theorem}: bound={row.bound:.4g} mean tan^2={row.empirical_mean_tan2:.4g} "
                        f"pass={row.pass_fraction:.3f}")

        if args.decay:
            decay, slope = potential_decay(spike_spectrum(args.dim), DECAY_CHECKPOINTS,
                                           trials=args.trials, seed=args.seed)
            root, _ = os.path.splitext(path)
            ReportUtils.write_table(decay, f"{root}_potential.csv")
            logger.info(f"Potential decay log-log slope {slope:.3f}")
        print(f"Wrote {len(table)} rows to {path}")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(VerifyBoundsCommand(app))
