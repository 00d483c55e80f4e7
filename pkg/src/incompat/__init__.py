"""Distributional (in)compatibility toolkit.

Piecewise-smooth tensor fields with singular interfaces, the four
distribution families concentrated in the bulk / on surfaces / as normal
dipoles / on curves, their closed-form distributional derivatives, and the
compatibility and defect-density checks built on top of them.
"""

from .backend import BACKEND_NAME

__version__ = "0.1.0"

__all__ = ["BACKEND_NAME", "__version__"]
