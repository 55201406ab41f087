"""Exact computations for the ring of genus-2 Siegel modular forms in characteristic 3."""

__version__ = "0.1.0"
