"""Exact desk-scale duality computations over iterated Laurent series fields."""
