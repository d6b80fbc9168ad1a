"""Rendering of squeeze-sim CSV/JSON output bundles into figure images."""

from .io import MissingColumn, SchemaMismatch, read_manifest, read_table, read_wigner
from .render import DPI, FigureRecipe, render

__all__ = [
    "DPI",
    "FigureRecipe",
    "MissingColumn",
    "SchemaMismatch",
    "read_manifest",
    "read_table",
    "read_wigner",
    "render",
]
