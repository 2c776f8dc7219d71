"""Panel regeneration for string-breaking simulation run directories."""

__version__ = "0.1.0"

from .loader import RunArtifact, SchemaError, load_run, load_sweep_table
from .panels import RUN_PANELS, sbt_curve, save
from .cli import main, render_run, render_sweep
