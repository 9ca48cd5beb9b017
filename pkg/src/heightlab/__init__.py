"""heightlab: exact-arithmetic laboratory for Weil and Neron-Tate heights
of elliptic-curve families over Q and over rational function fields F_p(u).

All core computations are exact (integers, fractions, polynomials); floats
appear only in reports and verdict summaries.
"""

from .exact_arith import (
    GF,
    QQ,
    BigRat,
    FunctionField,
    Poly,
    PrimeField,
    RatFunc,
    Rationals,
    base_field_label,
    parse_base_field,
    poly_gcd,
    ratfunc_normalize,
)

__version__ = "0.1.0"

__all__ = [
    "BigRat",
    "FunctionField",
    "GF",
    "Poly",
    "PrimeField",
    "QQ",
    "RatFunc",
    "Rationals",
    "base_field_label",
    "parse_base_field",
    "poly_gcd",
    "ratfunc_normalize",
    "__version__",
]
