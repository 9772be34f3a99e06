"""Exact graph and string isomorphism machinery over permutation coset
algebra, at a scale where every answer can be cross-checked against brute
force."""

__version__ = "0.1.0"
