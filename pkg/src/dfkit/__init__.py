"""Finite decoherence functionals, quantum measures and their Hilbert-space representations."""

__version__ = "0.1.0"
