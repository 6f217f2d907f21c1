"""Figure renderer for rbclock CSV artifacts (no physics recomputed)."""

__version__ = "0.1.0"

from .csvdata import SchemaError, Table, read_table
from .render import FIGURES, render
