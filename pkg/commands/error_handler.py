"""
Error handling for the OPDAD command line
Maps simulator errors to exit codes and one-line diagnostics.
"""

import logging
import sys
import traceback

from opdad_system.utils import (
    ConfigurationError, HypothesisViolation, NumericalError, StreamFormatError,
)

logger = logging.getLogger('opdad.cli')

EXIT_FAILURE = 1
EXIT_CONFIGURATION = 2
EXIT_STREAM = 3
EXIT_NUMERICAL = 4


class ErrorHandler:
    """Turns command failures into exit codes"""

    def __init__(self, app=None, stream=None):
        self.app = app
        self.stream = stream

    def _emit(self, message: str):
        print(message, file=self.stream or sys.stderr)

    def handle(self, error: BaseException, command: str = None) -> int:
        """Log the error, print a diagnostic line and return the exit code"""
        where = f" in {command}" if command else ""

        # StreamFormatError is also a ValueError, so it goes first
        if isinstance(error, StreamFormatError):
            logger.error(f"Stream error{where}: {error}")
            self._emit(f"Stream Error: {error}")
            return EXIT_STREAM

        if isinstance(error, HypothesisViolation):
            logger.error(f"Hypothesis violated{where}: {error}")
            self._emit(f"Hypothesis Violation: {error} (use --force to evaluate anyway)")
            return EXIT_NUMERICAL

        if isinstance(error, NumericalError):
            logger.error(f"Numerical error{where}: {error}")
            self._emit(f"Numerical Error: {error}")
            return EXIT_NUMERICAL

        if isinstance(error, (ConfigurationError, ValueError)):
            logger.error(f"Invalid configuration{where}: {error}")
            self._emit(f"Configuration Error: {error}")
            return EXIT_CONFIGURATION

        if isinstance(error, OSError):
            logger.error(f"I/O error{where}: {error}")
            self._emit(f"I/O Error: {error}")
            return EXIT_FAILURE

        # Generic errors
        logger.error(f"Unexpected error{where}: {error}")
        logger.error(''.join(traceback.format_exception(type(error), error, error.__traceback__)))
        self._emit(f"Unexpected Error: {error}")
        return EXIT_FAILURE


def setup(app):
    """Install the error handler on the application"""
    app.error_handler = ErrorHandler(app)
