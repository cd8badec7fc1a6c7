"""Series inversion in one variable through canonical polynomials.

With ``W = 1/V'`` the raising operator ``Y = x W(D)`` generates
``y_n = Y^n 1``. Expanding ``exp(x U(v)) = sum_n v^n/n! y_n(x)`` shows that
the coefficient of ``x^m/m!`` in ``y_n`` is the coefficient of ``v^n/n!`` in
``U(v)^m``. In particular ``[v^n] U = c_1(y_n) / n!``.

Polynomials in ``x`` are plain coefficient tuples, lowest degree first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import (
    DerivativeVanishesAtPoint,
    NotNormalized,
    OrderExhausted,
    PointMismatch,
    SingularDerivative,
)
from .field import DEFAULT_TOL, close, coerce
from .oracles import composition_residual
from .series import Series1, s1_derivative, s1_reciprocal

SeriesLike = Union[Series1, Sequence]

ZERO = Fraction(0)


def as_series(V: SeriesLike, N: int) -> Series1:
    """``V`` through order ``N``.

    A bare coefficient sequence is taken to be an exact polynomial and is
    zero-padded. A ``Series1`` must already be known to order ``N``.
    """
    if isinstance(V, Series1):
        if V.order < N:
            raise OrderExhausted(f"V is known only through order {V.order}, need {N}")
        return V.truncate(N)
    return Series1.from_poly(V, N)


def degree(y: Sequence) -> int:
    for j in range(len(y) - 1, -1, -1):
        if y[j] != 0:
            return j
    return -1


@dataclass(frozen=True)
class CanonicalBasis:
    """Rows ``y_0 .. y_N``; ``rows[k][j]`` is the coefficient of ``x^j`` in ``y_k``."""

    order: int
    rows: tuple

    def coefficient(self, k: int, j: int):
        return self.rows[k][j]

    def power_series(self, m: int) -> Series1:
        """``U(v)^m`` read off column ``m``: ``[v^n] = m! c_m(y_n) / n!``."""
        if not 0 <= m <= self.order:
            raise ValueError(f"power {m} outside 0..{self.order}")
        fm = math.factorial(m)
        return Series1(tuple(self.rows[n][m] * fm / math.factorial(n) for n in range(self.order + 1)))


@dataclass(frozen=True)
class InversionResult:
    """Truncated inverse, possibly re-centred at ``(z0, v0)``.

    ``powers[m]`` is ``U_1(w)^m`` in the local variable ``w = v - v0``, where
    ``U(v) = z0 + U_1(v - v0)``. For an unshifted problem ``z0 = v0 = 0``.
    """

    order: int
    powers: Mapping[int, Series1]
    method: str
    residual: object
    center: tuple = (ZERO, ZERO)

    @property
    def U(self) -> Series1:
        return self.powers[1]

    def expansion(self) -> Series1:
        """``z0 + U_1(w)`` as a series in ``w = v - v0``."""
        return self.U + self.center[0]


def compute_w(V: SeriesLike, N: int | None = None) -> Series1:
    """``1 / V'`` through order ``N - 1`` (default: ``V.order - 1``)."""
    if N is None:
        if not isinstance(V, Series1):
            raise TypeError("N is required when V is a coefficient sequence")
        N = V.order
    V = as_series(V, N)
    if V[0] != 0:
        raise NotNormalized("V(0) != 0; use shift_invert to re-centre")
    dV = s1_derivative(V)
    if dV[0] == 0:
        raise SingularDerivative("V'(0) = 0, no local inverse")
    return s1_reciprocal(dV)


def apply_operator(w: Series1, y: Sequence) -> tuple:
    """``w(D) y = sum_j w_j y^(j)`` on the polynomial ``y``.

    Only ``w_0 .. w_deg(y)`` are used; higher terms annihilate ``y``.
    """
    d = degree(y)
    if d > w.order:
        raise OrderExhausted(f"operator known to order {w.order}, polynomial has degree {d}")
    out = [ZERO] * (d + 1 if d >= 0 else 1)
    for j in range(d + 1):
        wj = w[j]
        if wj == 0:
            continue
        # j-th derivative: coefficient of x^i is y[i + j] * (i + j)! / i!
        for i in range(d - j + 1):
            c = y[i + j]
            if c != 0:
                out[i] += wj * c * math.perm(i + j, j)
    return tuple(out)


def raising_step(W: Series1, y: Sequence) -> tuple:
    """``x W(D) y``."""
    return (ZERO,) + apply_operator(W, y)


def _pad(y: Sequence, n: int) -> tuple:
    y = tuple(y)[: n + 1]
    return y + (ZERO,) * (n + 1 - len(y))


def canonical_from_w(W: Series1, N: int) -> CanonicalBasis:
    y = (Fraction(1),)
    rows = [_pad(y, N)]
    for _ in range(N):
        y = raising_step(W, y)
        rows.append(_pad(y, N))
    return CanonicalBasis(N, tuple(rows))


def canonical_polynomials(V: SeriesLike, N: int) -> CanonicalBasis:
    """``y_0 .. y_N`` for the map ``V``."""
    return canonical_from_w(compute_w(V, N), N)


def _result(V: Series1, basis: CanonicalBasis, method: str, powers=(1,)) -> InversionResult:
    pw = {m: basis.power_series(m) for m in sorted(set(powers) | {1})}
    return InversionResult(basis.order, pw, method, composition_residual(V, pw[1], basis.order))


def invert_series(V: SeriesLike, N: int, powers: Sequence[int] = (1,)) -> InversionResult:
    """Inverse of ``V`` through order ``N`` by the raising-operator route."""
    V = as_series(V, N)
    basis = canonical_polynomials(V, N)
    return _result(V, basis, "operator", powers)


def inverse_power(V: SeriesLike, m: int, N: int) -> Series1:
    """``U(v)^m`` through order ``N`` without forming ``U`` first."""
    if not 1 <= m <= N:
        raise ValueError(f"power {m} must lie in 1..{N}")
    return canonical_polynomials(V, N).power_series(m)


def taylor_shift(coeffs: Sequence, z0) -> tuple:
    """Coefficients of ``p(z + z0)`` for the polynomial ``p``."""
    z0 = coerce(z0)
    n = len(coeffs)
    out = [ZERO] * n
    for k, a in enumerate(coeffs):
        a = coerce(a)
        if a == 0:
            continue
        for j in range(k + 1):
            out[j] += a * math.comb(k, j) * z0 ** (k - j)
    return tuple(out)


def shift_invert(V: Sequence, z0, v0, N: int, tol: float = DEFAULT_TOL) -> InversionResult:
    """Invert the polynomial ``V`` near ``z0`` where ``V(z0) = v0``.

    Solves for ``V_1(z) = V(z + z0) - v0``, which vanishes at 0, and reports
    ``U(v) = z0 + U_1(v - v0)``.
    """
    if isinstance(V, Series1):
        V = V.coeffs
    z0, v0 = coerce(z0), coerce(v0)
    shifted = list(taylor_shift(V, z0))
    if not close(shifted[0], v0, tol):
        raise PointMismatch(f"V(z0) = {shifted[0]} but v0 = {v0}")
    shifted[0] = ZERO
    if len(shifted) < 2 or shifted[1] == 0:
        raise DerivativeVanishesAtPoint(f"V'({z0}) = 0")
    result = invert_series(shifted, N)
    return InversionResult(result.order, result.powers, result.method, result.residual, (z0, v0))


def lowering_apply(V: SeriesLike, y: Sequence) -> tuple:
    """``V(D) y``, with ``V`` read as a polynomial operator in ``D``."""
    d = max(degree(y), 0)
    if isinstance(V, Series1):
        V = V.coeffs
    return apply_operator(Series1.from_poly(V, d), y)
