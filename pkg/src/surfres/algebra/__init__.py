"""Exact fields, sparse polynomials, truncated series and a polynomial parser."""
from .fields import (QQ, ExtensionField, Field, FieldError, PrimeField, RationalField, extension,
                     make_field)
from .parse import ParseError, parse_poly
from .poly import (Poly, Ring, TruncationError, binom_mod, ideal_order, monomials_of_degree,
                   multi_indices_below)

__all__ = [
    "QQ", "ExtensionField", "Field", "FieldError", "PrimeField", "RationalField", "extension",
    "make_field", "ParseError", "parse_poly", "Poly", "Ring", "TruncationError", "binom_mod",
    "ideal_order", "monomials_of_degree", "multi_indices_below",
]
