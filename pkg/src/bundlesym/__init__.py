"""Exact symbolic calculus for matrix-coefficient differential operators.

Operators act on sections of a trivialized rank-``n`` vector bundle over a
chart with coordinates ``x1..xm``.  Subpackages:

``poly``        exact rational polynomials (the coefficient ring)
``matalg``      endomorphism fields, trace-free parts, nilpotent bases
``diffop``      composition, commutators, usual and filtration orders
``symbols``     graded symbols, their product and Poisson bracket
``connection``  covariant derivatives, curvature, order-1 splitting
``harness``     seeded verification suites used by the CLI
"""
from .connection import Connection, SplitPair, VectField
from .diffop import DiffOp, Section, commutator, compose, gamma, is_in_Pk, p_order
from .kernels import BACKEND
from .matalg import MatPoly, traceless_project
from .poly import Poly
from .symbols import GlSymbol, SymbolElem, sigma_pson, symbol_bracket, symbol_mul

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Connection",
    "DiffOp",
    "GlSymbol",
    "MatPoly",
    "Poly",
    "Section",
    "SplitPair",
    "SymbolElem",
    "VectField",
    "commutator",
    "compose",
    "gamma",
    "is_in_Pk",
    "p_order",
    "sigma_pson",
    "symbol_bracket",
    "symbol_mul",
    "traceless_project",
]
