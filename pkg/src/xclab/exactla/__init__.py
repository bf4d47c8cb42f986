"""Exact rational linear algebra: matrices, rank, LP, conic combinations."""

from .matrix import (
    ExactMatrix,
    Rational,
    format_rational,
    rank,
    rat,
    read_matrix,
    write_matrix,
)
from .simplex import LPResult, conic_combination, lp_solve

__all__ = [
    "ExactMatrix",
    "LPResult",
    "Rational",
    "conic_combination",
    "format_rational",
    "lp_solve",
    "rank",
    "rat",
    "read_matrix",
    "write_matrix",
]
