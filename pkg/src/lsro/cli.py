"""
``lsro-lab`` command line.

    lsro-lab [--config PATH] [--seed N] [--out DIR] [--quiet] <command> [options]

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Any, TextIO

from lsro_core.config import ConfigLoader, ExperimentConfig
from lsro_core.errors import LabError
from lsro_observability.logging import configure_logging, get_logger

from . import __version__
from .commands import COMMANDS, BaseCommand

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

logger = get_logger(__name__)


class UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class LabArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message, self.format_usage())


def _global_flags() -> argparse.ArgumentParser:
    flags = LabArgumentParser(add_help=False)
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    flags.add_argument("--config", default=argparse.SUPPRESS, help="key=value config file (section.key=value)")
    flags.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Base seed for data and cells")
    flags.add_argument("--out", default=argparse.SUPPRESS, help="Output directory")
    flags.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="Only log warnings and errors")
    return flags


def build_parser(stdout: TextIO | None = None) -> tuple[argparse.ArgumentParser, dict[str, BaseCommand]]:
    flags = _global_flags()
    parser = LabArgumentParser(prog="lsro-lab", description="LSRO re-identification lab", parents=[flags])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="<command>", parser_class=LabArgumentParser)
    commands: dict[str, BaseCommand] = {}
    for command_cls in COMMANDS:
        command = command_cls(stdout)
        command.add_arguments(sub.add_parser(command.name, help=command.help, parents=[flags]))
        commands[command.name] = command
    return parser, commands


def resolve_config(options: argparse.Namespace) -> ExperimentConfig:
    overrides: dict[str, Any] = {}
    if getattr(options, "seed", None) is not None:
        overrides["seed"] = options.seed
        overrides["synth"] = {"seed": options.seed}
    if getattr(options, "out", None) is not None:
        overrides["output_dir"] = options.out
    return ConfigLoader.load(getattr(options, "config", None), overrides)


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    parser, commands = build_parser(stdout)
    try:
        options = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{e.usage}lsro-lab: error: {e}\n")
        return EXIT_CONFIG
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)

    if not options.command:
        sys.stderr.write(parser.format_help())
        return EXIT_CONFIG

    configure_logging(logging.INFO, quiet=getattr(options, "quiet", False))
    try:
        cfg = resolve_config(options)
        return commands[options.command].handle(cfg, options) or EXIT_OK
    except LabError as e:
        logger.error("command failed", extra={"data": e.to_error_dict()})
        sys.stderr.write(f"lsro-lab {options.command}: {e}\n")
        return EXIT_CONFIG if e.is_config_error else EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
