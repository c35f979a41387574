from .base import BaseExperiment, ExperimentConfig, ExperimentResult
from .registry import ExperimentRegistry

__all__ = ["BaseExperiment", "ExperimentConfig", "ExperimentResult", "ExperimentRegistry"]
