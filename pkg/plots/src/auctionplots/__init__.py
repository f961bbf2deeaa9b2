"""Sweep-results figure rendering."""

from .render import (FigureSpec, SchemaError, load_rows, main, render,
                     render_all_panels, render_directory)

__all__ = ["FigureSpec", "SchemaError", "load_rows", "main", "render",
           "render_all_panels", "render_directory"]
