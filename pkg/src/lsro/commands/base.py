from __future__ import annotations

import argparse
import json
import sys
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, ClassVar, TextIO

from lsro_core.config import ExperimentConfig


class BaseCommand(ABC):
    """One ``lsro-lab`` subcommand: declares its arguments and handles a resolved config."""

    name: ClassVar[str]
    help: ClassVar[str]

    def __init__(self, stdout: TextIO | None = None):
        self.stdout = stdout or sys.stdout

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:  # noqa: B027
        pass

    @abstractmethod
    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int | None: ...

    def write(self, text: str = "") -> None:
        self.stdout.write(text + "\n")

    def write_json(self, payload: Any) -> None:
        self.write(json.dumps(payload, indent=2, sort_keys=True, default=str))

    @staticmethod
    def out_dir(cfg: ExperimentConfig) -> Path:
        path = Path(cfg.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path
