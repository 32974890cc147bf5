"""Batch renderer for the revdiss figure datasets.

Reads the published CSV/JSON files and draws the figures; never recomputes
any physics. Images are a pure function of the input datasets.
"""

import matplotlib

matplotlib.use("Agg")

from .io import SchemaError, load_dataset  # noqa: E402
from .recipes import FIGURE_IDS, render  # noqa: E402

__all__ = ["FIGURE_IDS", "SchemaError", "load_dataset", "render"]
__version__ = "0.1.0"
