"""Finite algebraic-logic workbench."""
__version__ = "0.1.0"
