"""Figure renderers for spinpump CSV output.

Pure post-processing: every number plotted is read from the emitted
columns, nothing is recomputed, so the figures cannot silently diverge
from the engine.
"""

__version__ = "0.1.0"

from .render import FAMILIES, FigureSpec, SchemaError, build_figure, render

__all__ = ["FAMILIES", "FigureSpec", "SchemaError", "build_figure", "render"]
