"""Symmetric-DoF analysis of partially connected interference networks under
finite-precision CSIT and unit coherence time."""

__version__ = "0.1.0"
