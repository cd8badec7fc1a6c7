"""Truncated power series, univariate and multivariate.

``Series1`` is a dense univariate series known through degree ``order``.
``MSeries`` is a sparse multivariate series truncated by total degree.
``SeriesMatrix`` is a square matrix of ``MSeries`` sharing one truncation.

All values are immutable. Arithmetic truncates to the smaller operand order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    InnerConstantNonzero,
    SingularAtOrigin,
    ZeroConstantTerm,
)
from .field import CLEANUP_TOL, coerce, is_zero

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# univariate


@dataclass(frozen=True)
class Series1:
    """Coefficients ``coeffs[j]`` of ``z**j`` for ``j = 0 .. order``."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(coerce(c) for c in self.coeffs)
        if not cs:
            raise ValueError("a series needs at least one coefficient")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, order: int) -> Series1:
        return cls((ZERO,) * (order + 1))

    @classmethod
    def one(cls, order: int) -> Series1:
        return cls.from_poly([1], order)

    @classmethod
    def identity(cls, order: int) -> Series1:
        """The series ``z``."""
        return cls.from_poly([0, 1], order)

    @classmethod
    def from_poly(cls, coeffs: Sequence, order: int) -> Series1:
        """Exact polynomial, zero-padded or cut to ``order``."""
        cs = list(coeffs)[: order + 1]
        cs += [0] * (order + 1 - len(cs))
        return cls(tuple(cs))

    def truncate(self, order: int) -> Series1:
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return Series1(self.coeffs[: order + 1])

    def __getitem__(self, j: int):
        return self.coeffs[j]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, Series1):
            other = Series1.from_poly([other], self.order)
        return s1_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Series1(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series1):
            return s1_mul(self, other)
        other = coerce(other)
        return Series1(tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __pow__(self, m: int):
        return s1_pow(self, m)


def s1_add(a: Series1, b: Series1) -> Series1:
    n = min(a.order, b.order)
    return Series1(tuple(a[j] + b[j] for j in range(n + 1)))


def s1_mul(a: Series1, b: Series1) -> Series1:
    """Cauchy product truncated at ``min(a.order, b.order)``."""
    n = min(a.order, b.order)
    out = []
    for k in range(n + 1):
        acc = ZERO
        for j in range(k + 1):
            acc += a[j] * b[k - j]
        out.append(acc)
    return Series1(tuple(out))


def s1_pow(a: Series1, m: int) -> Series1:
    if m < 0:
        raise ValueError("negative powers need s1_reciprocal")
    result = Series1.one(a.order)
    for _ in range(m):
        result = s1_mul(result, a)
    return result


def s1_reciprocal(a: Series1) -> Series1:
    if a[0] == 0:
        raise ZeroConstantTerm("reciprocal of a series with zero constant term")
    inv0 = 1 / a[0]
    r = [inv0]
    for k in range(1, a.order + 1):
        acc = ZERO
        for j in range(1, k + 1):
            acc += a[j] * r[k - j]
        r.append(-acc * inv0)
    return Series1(tuple(r))


def s1_derivative(a: Series1) -> Series1:
    if a.order == 0:
        return Series1((ZERO,))
    return Series1(tuple(j * a[j] for j in range(1, a.order + 1)))


def s1_compose(outer: Series1, inner: Series1) -> Series1:
    """``outer(inner(v))`` by Horner's rule in the truncated ring."""
    if inner[0] != 0:
        raise InnerConstantNonzero("inner series must vanish at the origin")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    result = Series1.from_poly([outer[n]], n)
    for j in range(n - 1, -1, -1):
        result = s1_mul(result, inner) + outer[j]
    return result


# ---------------------------------------------------------------------------
# multivariate


def multi_indices(nvars: int, order: int) -> Iterator[tuple]:
    """All exponent tuples with total degree <= order, graded then lex."""
    for d in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            idx = [0] * nvars
            for i in combo:
                idx[i] += 1
            yield tuple(idx)


def unit_index(nvars: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(nvars))


def mi_factorial(n: Sequence[int]) -> int:
    return math.prod(math.factorial(k) for k in n)


@dataclass(frozen=True, eq=False)
class MSeries:
    """Sparse series in ``nvars`` variables, truncated at total degree ``order``.

    Exact zeros are never stored. Float coefficients of tiny magnitude are kept
    until :meth:`cleanup` is called.
    """

    nvars: int
    order: int
    terms: Mapping[tuple, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("nvars must be positive")
        clean = {}
        for idx, c in self.terms.items():
            idx = tuple(idx)
            if len(idx) != self.nvars:
                raise DimensionMismatch(f"index {idx} has wrong length for {self.nvars} variables")
            if sum(idx) > self.order:
                continue
            c = coerce(c)
            if c != 0:
                clean[idx] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def constant(cls, c, nvars: int, order: int) -> MSeries:
        return cls(nvars, order, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int, order: int) -> MSeries:
        return cls(nvars, order, {unit_index(nvars, i): 1})

    def __getitem__(self, idx) -> object:
        return self.terms.get(tuple(idx), ZERO)

    def __eq__(self, other):
        if not isinstance(other, MSeries):
            return NotImplemented
        return (self.nvars, self.order, self.terms) == (other.nvars, other.order, other.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*x^{idx}" for idx, c in sorted(self.terms.items())) or "0"
        return f"MSeries<{self.nvars}, {self.order}>({body})"

    @property
    def constant_term(self):
        return self[(0,) * self.nvars]

    def degree(self) -> int:
        """Total degree of the highest stored term, -1 for zero."""
        return max((sum(i) for i in self.terms), default=-1)

    def with_order(self, order: int) -> MSeries:
        """Re-truncate. Extending is only meaningful for exact polynomials."""
        return MSeries(self.nvars, order, self.terms)

    def homogeneous_part(self, d: int) -> MSeries:
        return MSeries(self.nvars, self.order, {i: c for i, c in self.terms.items() if sum(i) == d})

    def cleanup(self, tol: float = CLEANUP_TOL) -> MSeries:
        return MSeries(self.nvars, self.order, {i: c for i, c in self.terms.items() if not is_zero(c, tol)})

    def __add__(self, other):
        if not isinstance(other, MSeries):
            other = MSeries.constant(other, self.nvars, self.order)
        return ms_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return MSeries(self.nvars, self.order, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MSeries):
            return ms_mul(self, other)
        other = coerce(other)
        return MSeries(self.nvars, self.order, {i: c * other for i, c in self.terms.items()})

    __rmul__ = __mul__


def _check_compatible(a: MSeries, b: MSeries):
    if a.nvars != b.nvars:
        raise DimensionMismatch(f"{a.nvars} vs {b.nvars} variables")


def ms_add(a: MSeries, b: MSeries) -> MSeries:
    _check_compatible(a, b)
    out = dict(a.terms)
    for i, c in b.terms.items():
        out[i] = out.get(i, ZERO) + c
    return MSeries(a.nvars, min(a.order, b.order), out)


def ms_mul(a: MSeries, b: MSeries) -> MSeries:
    _check_compatible(a, b)
    order = min(a.order, b.order)
    out: dict = {}
    for i, c in a.terms.items():
        di = sum(i)
        if di > order:
            continue
        for j, d in b.terms.items():
            if di + sum(j) > order:
                continue
            k = tuple(p + q for p, q in zip(i, j))
            out[k] = out.get(k, ZERO) + c * d
    return MSeries(a.nvars, order, out)


def ms_pow(a: MSeries, m: int) -> MSeries:
    result = MSeries.constant(1, a.nvars, a.order)
    for _ in range(m):
        result = ms_mul(result, a)
    return result


def ms_partial(a: MSeries, i: int) -> MSeries:
    """Derivative in variable ``i`` (0-based); order drops by one."""
    if not 0 <= i < a.nvars:
        raise DimensionMismatch(f"variable {i} out of range for {a.nvars} variables")
    out = {}
    for idx, c in a.terms.items():
        if idx[i] == 0:
            continue
        new = list(idx)
        new[i] -= 1
        out[tuple(new)] = c * idx[i]
    return MSeries(a.nvars, max(a.order - 1, 0), out)


def ms_compose(outer: MSeries, inner: Sequence[MSeries]) -> MSeries:
    """Substitute ``inner[k]`` for variable ``k`` of ``outer``."""
    if len(inner) != outer.nvars:
        raise DimensionMismatch("need one inner series per outer variable")
    for s in inner:
        if s.constant_term != 0:
            raise InnerConstantNonzero("inner series must vanish at the origin")
    nv = inner[0].nvars
    order = min(min(s.order for s in inner), outer.order)
    powers = [[MSeries.constant(1, nv, order)] for _ in inner]
    result = MSeries(nv, order)
    for idx, c in outer.terms.items():
        term = MSeries.constant(c, nv, order)
        for k, e in enumerate(idx):
            while len(powers[k]) <= e:
                powers[k].append(ms_mul(powers[k][-1], inner[k].with_order(order)))
            term = ms_mul(term, powers[k][e])
        result = ms_add(result, term)
    return result


# ---------------------------------------------------------------------------
# matrices of series


@dataclass(frozen=True)
class SeriesMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("series matrix must be square and non-empty")
        shapes = {(e.nvars, e.order) for r in rows for e in r}
        if len(shapes) != 1:
            raise DimensionMismatch(f"entries disagree on (nvars, order): {sorted(shapes)}")
        object.__setattr__(self, "entries", rows)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def nvars(self) -> int:
        return self.entries[0][0].nvars

    @property
    def order(self) -> int:
        return self.entries[0][0].order

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def identity(cls, dim: int, nvars: int, order: int) -> SeriesMatrix:
        return cls.from_constants([[1 if i == j else 0 for j in range(dim)] for i in range(dim)], nvars, order)

    @classmethod
    def from_constants(cls, rows, nvars: int, order: int) -> SeriesMatrix:
        return cls(tuple(tuple(MSeries.constant(c, nvars, order) for c in r) for r in rows))

    def constant_part(self) -> list:
        return [[e.constant_term for e in r] for r in self.entries]

    def __matmul__(self, other: SeriesMatrix) -> SeriesMatrix:
        return sm_mul(self, other)

    def __add__(self, other: SeriesMatrix) -> SeriesMatrix:
        n = self.dim
        return SeriesMatrix(tuple(tuple(ms_add(self[i, j], other[i, j]) for j in range(n)) for i in range(n)))

    def __sub__(self, other: SeriesMatrix) -> SeriesMatrix:
        n = self.dim
        return SeriesMatrix(tuple(tuple(ms_add(self[i, j], -other[i, j]) for j in range(n)) for i in range(n)))


def sm_mul(a: SeriesMatrix, b: SeriesMatrix) -> SeriesMatrix:
    if a.dim != b.dim:
        raise DimensionMismatch("matrix dimensions differ")
    n = a.dim
    order = min(a.order, b.order)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = MSeries(a.nvars, order)
            for k in range(n):
                acc = ms_add(acc, ms_mul(a[i, k], b[k, j]))
            row.append(acc)
        rows.append(tuple(row))
    return SeriesMatrix(tuple(rows))


def invert_constant_matrix(rows) -> list:
    """Gauss-Jordan with largest-magnitude pivoting; exact for Fractions."""
    n = len(rows)
    aug = [[coerce(c) for c in r] + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if aug[piv][col] == 0:
            raise SingularAtOrigin("constant term matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [r[n:] for r in aug]


def ms_invert_matrix(J: SeriesMatrix) -> SeriesMatrix:
    """Two-sided inverse of ``J`` through its truncation order.

    With ``A = J(0)^-1`` and ``K = I - A J`` (no constant term),
    ``J^-1 = (I - K)^-1 A = (I + K + K^2 + ...) A``; powers of ``K`` past
    the order vanish, so the sum is finite.
    """
    n, nv, order = J.dim, J.nvars, J.order
    A = SeriesMatrix.from_constants(invert_constant_matrix(J.constant_part()), nv, order)
    AJ = sm_mul(A, J)
    K = SeriesMatrix(
        tuple(
            tuple(
                MSeries(nv, order, {idx: -c for idx, c in AJ[i, j].terms.items() if sum(idx) > 0})
                for j in range(n)
            )
            for i in range(n)
        )
    )
    total = SeriesMatrix.identity(n, nv, order)
    power = total
    for _ in range(order):
        power = sm_mul(power, K)
        total = total + power
    return sm_mul(total, A)
