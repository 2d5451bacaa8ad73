"""Exact arithmetic: F_p polynomials, rational functions, quadratic function fields."""

from .field import FuncElem, FunctionField, substitute
from .parse import parse_elem, parse_poly
from .poly import Poly, gcd, lcm
from .ratfunc import RatFunc

__all__ = ["FuncElem", "FunctionField", "Poly", "RatFunc", "gcd", "lcm",
           "parse_elem", "parse_poly", "substitute"]
