"""Finite-dimensional models of L^p operator algebras and crossed products.

Exact and certified computations: p -> p operator norms, spatial isometries,
crossed products by finite groups and Z, free-action averaging, the Leavitt
algebra and its L^p representations, the stabilized UHF crossed product and
the K-theory of O_d.
"""
__version__ = "0.1.0"
