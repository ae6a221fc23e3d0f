from .experiments import ExperimentConfig, run_experiment
from .fnspec import FnSpecError, canonical, parse, parse_fn_spec
from .main import main

__all__ = ["ExperimentConfig", "FnSpecError", "canonical", "main", "parse", "parse_fn_spec", "run_experiment"]
