"""
OPDAD Simulator
Command-line entry point for burst-jamming detection experiments.
"""

import argparse
import importlib
import os
import sys
from typing import List, Optional

from config import Config


class OpdadApp:
    """Main application class: argparse command tree with dynamically loaded commands"""

    def __init__(self):
        self.parser = argparse.ArgumentParser(
            prog='opdad',
            description='Online principal-direction anomaly detection of burst jamming in massive MIMO uplinks',
        )
        self.subparsers = self.parser.add_subparsers(dest='command', metavar='COMMAND')
        self.subparsers.required = True
        self.commands = {}
        self.error_handler = None

        # Setup logging
        self.logger = Config.setup_logging()

    def add_command(self, command):
        """Register a command object exposing name, help, configure(parser) and run(args)"""
        parser = self.subparsers.add_parser(command.name, help=command.help, description=command.help)
        command.configure(parser)
        parser.set_defaults(handler=command.run)
        self.commands[command.name] = command
        return parser

    def load_commands(self):
        """Load all command modules from the commands directory"""
        command_modules = []

        commands_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'commands')
        if os.path.exists(commands_path):
            for filename in sorted(os.listdir(commands_path)):
                if filename.endswith('.py') and not filename.startswith('__'):
                    command_modules.append(f'commands.{filename[:-3]}')

        for name in command_modules:
            try:
                module = importlib.import_module(name)
                setup = getattr(module, 'setup', None)
                if setup is None:
                    continue
                setup(self)
                self.logger.debug(f"Loaded command module: {name}")
            except Exception as e:
                self.logger.error(f"Failed to load command module {name}: {e}")

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Parse arguments, dispatch to the chosen command and return its exit code"""
        args = self.parser.parse_args(argv)
        self.logger.info(f"Running command: {args.command}")
        try:
            code = args.handler(args) or 0
        except Exception as e:
            if self.error_handler is None:
                raise
            return self.error_handler.handle(e, args.command)
        self.logger.info(f"Command {args.command} finished")
        return code


def main(argv: Optional[List[str]] = None) -> int:
    """Main function to run the simulator with proper error handling"""
    try:
        Config.validate_config()
    except ValueError as e:
        print(f"Configuration Error: {e}", file=sys.stderr)
        print("Please check the OPDAD_* and LOG_* environment variables or your .env file.", file=sys.stderr)
        return 2

    app = OpdadApp()
    app.load_commands()
    try:
        return app.run(argv)
    except KeyboardInterrupt:
        print("\nStopped by user.", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
