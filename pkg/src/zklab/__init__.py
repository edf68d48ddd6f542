"""Finite-scale laboratory for zero-knowledge deciders built from distributional inverters."""

__version__ = "0.1.0"
