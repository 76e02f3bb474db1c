from ._version import __version__
from .pipeline.evaluate import evaluate_files
from .pipeline.generate import generate
from .pipeline.render import render
from .pipeline.run import load_config, run
from .pipeline.sweep import sweep
from .plot.sweep import plot_sweep
from .setup.config import Config

__all__ = ["__version__", "Config", "evaluate_files", "generate", "load_config", "plot_sweep", "render", "run", "sweep"]
