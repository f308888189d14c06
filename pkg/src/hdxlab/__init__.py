"""Desk-scale laboratory for high-dimensional expanders built from symplectic buildings."""
