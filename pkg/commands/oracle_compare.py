"""
Oracle-compare command
Tracks the principal direction of a stationary stream against the brute-force one.
"""

import logging

from opdad_system.managers.experiment_manager import ORACLE_REFERENCES, oracle_compare
from .utilities import ReportUtils

logger = logging.getLogger('opdad.cli')


class OracleCompareCommand:
    """Gap and angle of the tracker against the batch eigendecomposition"""

    name = 'oracle-compare'
    help = 'Write seed,block,gap,angle_deg of the tracker against the brute-force principal direction'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        parser.add_argument('--config', help='experiment JSON file (its scenario is used)')
        parser.add_argument('--M', type=int, help='antenna count (overrides the config file)')
        parser.add_argument('--blocks', type=int, default=2000)
        parser.add_argument('--seeds', type=int, nargs='+', default=[0, 1, 2])
        parser.add_argument('--every', type=int, default=10, help='record every n-th block')
        parser.add_argument('--jammed', action='store_true', help='jammers always on')
        parser.add_argument('--reference', choices=ORACLE_REFERENCES, default='sample',
                            help='sample: second moment of the blocks seen so far; exact: model covariance')
        parser.add_argument('--out', help='output CSV (default under OPDAD_OUTPUT_DIR)')

    def run(self, args) -> int:
        scenario = ReportUtils.load_scenario(args)
        if args.M is not None:
            scenario = scenario.with_updates(M=args.M)
        table = oracle_compare(scenario, blocks=args.blocks, seeds=args.seeds, jammed=args.jammed,
                               every=args.every, reference=args.reference)
        path = ReportUtils.output_path(args, 'oracle_compare.csv')
        ReportUtils.write_table(table, path)

        final = table[table['block'] == table['block'].max()]
        logger.info(f"Final gap mean {final['gap'].mean():.4g}, angle mean {final['angle_deg'].mean():.3f} deg")
        print(f"Wrote {len(table)} rows to {path}")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(OracleCompareCommand(app))
