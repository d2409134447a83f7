"""
Utility command for the OPDAD simulator
Shared report helpers and the `info` command.
"""

import importlib
import logging
import os
import sys
from typing import Dict, Optional

import pandas as pd

import opdad_system
from config import Config
from opdad_system.managers.experiment_manager import host_info
from opdad_system.models import ExperimentConfig, ScenarioConfig

logger = logging.getLogger('opdad.cli')

REPORTED_PACKAGES = ['numpy', 'scipy', 'pandas', 'sklearn', 'joblib', 'psutil']


class ReportUtils:
    """Utility class for consistent experiment loading and CSV output"""

    @staticmethod
    def add_common_arguments(parser, config: bool = True, trials: bool = True):
        """
        Add the flags shared by the experiment commands

        Args:
            parser: argparse parser of the command
            config: Whether to accept --config
            trials: Whether to accept --trials and --workers
        """
        if config:
            parser.add_argument('--config', help='experiment JSON file')
        parser.add_argument('--seed', type=int, help='master seed (overrides the config file)')
        if trials:
            parser.add_argument('--trials', type=int, help='Monte Carlo trials (overrides the config file)')
            parser.add_argument('--workers', type=int, help='joblib worker count, -1 for all cores')
        parser.add_argument('--out', help='output file (default: under OPDAD_OUTPUT_DIR)')

    @staticmethod
    def load_experiment(args) -> ExperimentConfig:
        """
        Build the experiment configuration

        Precedence is command-line flag, then config file, then Config
        environment defaults.

        Returns:
            ExperimentConfig: Validated configuration
        """
        defaults = {
            'seed': Config.default_seed(),
            'trials': Config.default_trials(),
            'workers': Config.default_workers(),
        }
        path = getattr(args, 'config', None)
        if path:
            cfg = ExperimentConfig.from_file(path, defaults)
        else:
            cfg = ExperimentConfig.from_dict({}, defaults)

        for name in ('seed', 'trials', 'workers'):
            value = getattr(args, name, None)
            if value is not None:
                setattr(cfg, name, value)
        return cfg.validate()

    @staticmethod
    def load_scenario(args) -> ScenarioConfig:
        """Scenario part of --config, or the defaults"""
        path = getattr(args, 'config', None)
        if path:
            return ExperimentConfig.from_file(path).scenario.validate()
        return ScenarioConfig().validate()

    @staticmethod
    def output_path(args, default_name: str) -> str:
        """--out if given, else default_name inside the output directory"""
        path = getattr(args, 'out', None) or os.path.join(Config.OUTPUT_DIR, default_name)
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        return path

    @staticmethod
    def write_table(table: pd.DataFrame, path: Optional[str]) -> Optional[str]:
        """Write a table as CSV to path, or to stdout when path is None or '-'"""
        if path is None or path == '-':
            table.to_csv(sys.stdout, index=False)
            return None
        table.to_csv(path, index=False)
        logger.info(f"Wrote {len(table)} rows to {path}")
        return path

    @staticmethod
    def package_versions() -> Dict[str, str]:
        versions = {'opdad_system': opdad_system.__version__}
        for name in REPORTED_PACKAGES:
            try:
                module = importlib.import_module(name)
                versions[name] = getattr(module, '__version__', 'unknown')
            except ImportError:
                versions[name] = 'missing'
        return versions


class InfoCommand:
    """Show package versions and a host description"""

    name = 'info'
    help = 'Show package versions and host description'

    def __init__(self, app):
        self.app = app

    def configure(self, parser):
        pass

    def run(self, args) -> int:
        for key, value in {**host_info(), **ReportUtils.package_versions()}.items():
            print(f"{key}: {value}")
        return 0


def setup(app):
    """Setup function to add this command to the application"""
    app.add_command(InfoCommand(app))
