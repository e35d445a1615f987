"""Knot Floer complexes, large-surgery d-invariants and metabolizer obstructions."""

__version__ = "1.0.0"
