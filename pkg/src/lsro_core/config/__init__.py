from .loader import ConfigLoader
from .schemas import (
    STRATEGIES,
    EvalConfig,
    ExperimentConfig,
    GanConfig,
    NetworkConfig,
    SynthConfig,
    TrainConfig,
)

__all__ = [
    "STRATEGIES",
    "ConfigLoader",
    "EvalConfig",
    "ExperimentConfig",
    "GanConfig",
    "NetworkConfig",
    "SynthConfig",
    "TrainConfig",
]
