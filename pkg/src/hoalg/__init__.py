"""Exact-arithmetic engine for finite-dimensional homotopical algebra.

Strong homotopy (A-infinity[1] / L-infinity[1]) structures over the rationals:
coalgebra calculus, homotopy transfer, mapping cocones and derived brackets,
Maurer-Cartan theory over Artin rings, and synthetic Hodge-package models of
formal period maps and Yukawa algebras.
"""

from .graded import (
    Fraction, MalformedInput, RejectedInput, UnsupportedOperation,
    koszul_sign, unshuffles, bernoulli,
    GradedSpace, GradedMap, MultilinearMap, Contraction, check_contraction,
    Report, TENSOR, SYMMETRIC,
)

__version__ = "0.1.0"
