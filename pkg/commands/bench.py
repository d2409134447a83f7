"""
Bench command
Per-block wall time of the detection methods as the antenna count grows.
"""

import logging

from opdad_system.managers.experiment_manager import bench, host_info
from .utilities import ReportUtils

logger = logging.getLogger('opdad.cli')


class BenchCommand:
    """Timing table with the host description attached"""

    name = 'bench'
    help = 'Time each method per block over a range of antenna counts'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        parser.add_argument('--methods', nargs='+', default=['opdad', 'sd'], choices=['opdad', 'ed', 'sd', 'dmf'])
        parser.add_argument('--antennas', type=int, nargs='+', default=[16, 32, 64, 128, 256])
        parser.add_argument('--blocks', type=int, default=200)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', help='output CSV (default under OPDAD_OUTPUT_DIR)')

    def run(self, args) -> int:
        table, slopes = bench(args.methods, sorted(args.antennas), blocks=args.blocks, seed=args.seed)
        host = host_info()
        table['cpu_count'] = host['cpu_count']
        table['platform'] = host['platform']
        path = ReportUtils.output_path(args, 'bench.csv')
        ReportUtils.write_table(table, path)
        for method, slope in slopes.items():
            print(f"{method}: log-log slope of time per block against M = {slope:.2f}")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(BenchCommand(app))
