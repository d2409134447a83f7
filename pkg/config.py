"""
Configuration module for the OPDAD simulator
Handles environment variables and process-level settings.
"""

import os
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Simulator configuration class"""

    # Reproducibility
    MASTER_SEED = os.getenv('OPDAD_SEED', '20240601')

    # Monte Carlo settings
    TRIALS = os.getenv('OPDAD_TRIALS', '500')
    WORKERS = os.getenv('OPDAD_WORKERS', '1')

    # Where CSV tables and stream files go when --out is not given
    OUTPUT_DIR = os.getenv('OPDAD_OUTPUT_DIR', 'results')

    # Logging configuration
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', 'opdad.log')

    @classmethod
    def validate_config(cls):
        """Validate that the environment settings are usable"""
        for name in ('MASTER_SEED', 'TRIALS', 'WORKERS'):
            try:
                int(getattr(cls, name))
            except (TypeError, ValueError):
                raise ValueError(f"{name} must be an integer, got {getattr(cls, name)!r}")
        if int(cls.TRIALS) < 1:
            raise ValueError("OPDAD_TRIALS must be at least 1")
        if int(cls.WORKERS) == 0:
            raise ValueError("OPDAD_WORKERS must be non-zero (use -1 for all cores)")
        if not isinstance(getattr(logging, cls.LOG_LEVEL.upper(), None), int):
            raise ValueError(f"Unknown LOG_LEVEL: {cls.LOG_LEVEL}")
        return True

    @classmethod
    def default_seed(cls) -> int:
        return int(cls.MASTER_SEED)

    @classmethod
    def default_trials(cls) -> int:
        return int(cls.TRIALS)

    @classmethod
    def default_workers(cls) -> int:
        return int(cls.WORKERS)

    @classmethod
    def setup_logging(cls):
        """Setup logging configuration"""
        logging.basicConfig(
            level=getattr(logging, cls.LOG_LEVEL.upper()),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=[
                logging.FileHandler(cls.LOG_FILE),
                logging.StreamHandler()
            ]
        )
        return logging.getLogger('opdad')
