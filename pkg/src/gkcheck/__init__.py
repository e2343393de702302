"""Exact verification of (twisted) generalized Kähler structures on Lie algebras."""

__version__ = "0.1.0"
