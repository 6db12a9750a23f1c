"""Finitary constructions for zero-dimensional realizations of invariant-measure simplices."""

__version__ = "0.1.0"
