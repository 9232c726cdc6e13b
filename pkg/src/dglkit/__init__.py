"""Exact computations with connected differential graded Lie algebras over the rationals."""

__version__ = "0.1.0"
