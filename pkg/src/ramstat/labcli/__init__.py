"""Experiment configuration, parallel sweeps, result files and the command line."""
from .config import ExperimentConfig, load_config, validate
from .runner import run, sweep, write

__all__ = ["ExperimentConfig", "load_config", "validate", "run", "sweep", "write"]
