"""Exact arithmetic and calculus on exp-polynomials."""

from .exppoly import (
    MAX_AXES,
    ONE_POLY,
    ZERO_POLY,
    ExpPoly,
    ExpPolyTerm,
    NonRealResult,
    add,
    coords,
    differentiate,
    evaluate,
    mul,
    substitute_params,
)
from .numbers import (
    BACKEND,
    IUNIT,
    ONE,
    ZERO,
    GaussianRational,
    ParamPoly,
    Q,
    UnboundParameter,
    as_rational,
    format_rational,
    gr,
)
from .parser import ExprSyntaxError, UnknownSymbol, parse
from .printer import format_scalar, to_text

__all__ = [
    "BACKEND",
    "ExpPoly",
    "ExpPolyTerm",
    "ExprSyntaxError",
    "GaussianRational",
    "IUNIT",
    "MAX_AXES",
    "NonRealResult",
    "ONE",
    "ONE_POLY",
    "ParamPoly",
    "Q",
    "UnboundParameter",
    "UnknownSymbol",
    "ZERO",
    "ZERO_POLY",
    "add",
    "as_rational",
    "coords",
    "differentiate",
    "evaluate",
    "format_rational",
    "format_scalar",
    "gr",
    "mul",
    "parse",
    "substitute_params",
    "to_text",
]
