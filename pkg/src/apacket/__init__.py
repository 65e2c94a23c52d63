"""Combinatorics of Arthur packets for classical groups: indices, reductions and Langlands data."""
