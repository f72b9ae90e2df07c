from .base import BaseCommand
from .data import GenDataCommand
from .evaluate import EvaluateCommand
from .gan import SampleOutliersCommand, TrainGanCommand
from .sweep import ReportCommand, SweepCommand
from .train import TrainCommand

COMMANDS: tuple[type[BaseCommand], ...] = (
    GenDataCommand,
    TrainGanCommand,
    SampleOutliersCommand,
    TrainCommand,
    EvaluateCommand,
    SweepCommand,
    ReportCommand,
)

__all__ = ["COMMANDS", "BaseCommand"]
