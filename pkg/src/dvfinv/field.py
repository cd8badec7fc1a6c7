"""Coefficient field handling.

Two fields are supported: exact rationals (``fractions.Fraction``) and
machine floats. The field is carried by the coefficients themselves; ints are
promoted to ``Fraction`` so that division never silently falls back to float.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Coeff = Union[Fraction, float]

DEFAULT_TOL = 1e-10
CLEANUP_TOL = 1e-14

RATIONAL = "rational"
FLOAT = "float"


def coerce(c) -> Coeff:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (bool,)):
        return Fraction(int(c))
    if isinstance(c, Rational):
        return Fraction(c)
    if isinstance(c, float):
        return c
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def is_exact(c) -> bool:
    return isinstance(c, Rational)


def mode_of(coeffs: Iterable) -> str:
    return RATIONAL if all(is_exact(c) for c in coeffs) else FLOAT


def is_zero(c, tol: float = 0.0) -> bool:
    if is_exact(c) or tol == 0.0:
        return c == 0
    return abs(c) <= tol


def close(a, b, tol: float = DEFAULT_TOL) -> bool:
    """Exact equality for rationals, absolute tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(a - b) <= tol


def max_abs(values: Iterable) -> Coeff:
    best = Fraction(0)
    for v in values:
        if abs(v) > best:
            best = abs(v)
    return best


def to_float(c) -> float:
    return float(c)


def format_coeff(c) -> Union[str, float]:
    """Rationals become ``"p/q"`` strings; floats stay JSON numbers."""
    if is_exact(c):
        return str(Fraction(c))
    if math.isfinite(c):
        return c
    return str(c)
