"""Batch renderer for variational-evolution run CSVs."""

__version__ = "0.1.0"

from .panels import PANEL_KINDS, PanelError, PanelSpec, load_columns, render
