"""Finite-dimensional operator-algebra and effectus-theory workbench."""
__version__ = "0.1.0"
