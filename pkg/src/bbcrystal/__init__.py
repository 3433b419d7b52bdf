"""Exact crystal and global bases for quantum Borcherds-Bozec algebras.

The package computes, in exact rational-function arithmetic, the negative
half of a quantum Borcherds-Bozec algebra together with its irreducible
highest-weight modules: bilinear forms, crystal bases, global bases,
abstract-crystal tensor products, and lower/upper perfect bases.
"""

__version__ = "0.1.0"
