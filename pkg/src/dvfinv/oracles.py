"""Independent checks for the inversion routes.

Nothing here touches the canonical polynomials: Lagrange inversion works on
powers of ``z / V(z)``, the residual composes directly, and the closed forms
are written out from their known coefficient formulas.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import SingularDerivative
from .field import coerce, max_abs
from .series import Series1, s1_compose, s1_mul, s1_reciprocal


def lagrange_invert(V: Series1, N: int) -> Series1:
    """Compositional inverse via ``[v^n] U = (1/n) [z^(n-1)] (z / V(z))^n``."""
    if V.order < N:
        raise ValueError(f"V is known only through order {V.order}, need {N}")
    if V[0] != 0:
        raise ValueError("V must vanish at the origin")
    if V[1] == 0:
        raise SingularDerivative("V'(0) = 0")
    if N == 0:
        return Series1.zero(0)
    # V(z)/z, known through order N - 1
    quotient = Series1(V.coeffs[1 : N + 1])
    h = s1_reciprocal(quotient)
    coeffs = [Fraction(0)]
    power = Series1.one(N - 1)
    for n in range(1, N + 1):
        power = s1_mul(power, h)
        coeffs.append(power[n - 1] / n)
    return Series1(tuple(coeffs))


def composition_residual(V: Series1, U: Series1, N: int):
    """Max-norm of the coefficients of ``V(U(v)) - v`` through order ``N``.

    Zero in rational mode exactly when ``U`` inverts ``V`` to order ``N``.
    """
    if V.order < N or U.order < N:
        raise ValueError("both series must be known through order N")
    comp = s1_compose(V.truncate(N), U.truncate(N))
    diff = [comp[j] - (1 if j == 1 else 0) for j in range(N + 1)]
    return max_abs(diff)


def chebyshev_u(alpha, n: int):
    """U_n(alpha) from the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    alpha = coerce(alpha)
    prev, cur = alpha**0, 2 * alpha
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * alpha * cur - prev
    return cur


def chebyshev_u_sequence(alpha, n: int) -> list:
    return [chebyshev_u(alpha, k) for k in range(n + 1)]


def t3_inverse_closed_form(N: int) -> Series1:
    """Inverse of ``4z^3 - 3z`` near 0 from its binomial closed form.

    ``U(v) = -(1/3) sum_n C(3n, n) (4/27)^n v^(2n+1) / (2n+1)``
    """
    coeffs = [Fraction(0)] * (N + 1)
    n = 0
    while 2 * n + 1 <= N:
        coeffs[2 * n + 1] = Fraction(-1, 3) * math.comb(3 * n, n) * Fraction(4, 27) ** n / (2 * n + 1)
        n += 1
    return Series1(tuple(coeffs))


def w_period8_closed_form(N: int) -> Series1:
    """Series of ``(1 + sqrt2 z + z^2) / (1 + z^4)`` in floating point."""
    r2 = math.sqrt(2.0)
    num = Series1.from_poly([1.0, r2, 1.0], N)
    den = Series1.from_poly([1.0, 0.0, 0.0, 0.0, 1.0], N)
    return s1_mul(num, s1_reciprocal(den))
