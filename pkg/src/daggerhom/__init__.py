"""Exact computations around dagger completions of group algebras."""

__version__ = "0.1.0"
