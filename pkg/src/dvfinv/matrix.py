"""Matrix formulations of the raising-operator iteration.

Two routes:

* the coefficient recursion ``c^(k+1) = c^(k) P W Q`` on row vectors of
  x-coefficients, with ``W`` a Toeplitz matrix of the ``w_j`` and ``P``,
  ``M``, ``Q`` diagonal factorial weights (``QP = M``);
* the operator matrices ``Dbar``, ``Xbar`` on the monomial basis
  ``1, x, .., x^n`` with ``Ybar = Xbar W(Dbar)`` iterated on ``e_1``, and
  their Kronecker products for several variables.

Matrices are stored sparsely as ``{row: {col: value}}``; entries may be
``Fraction`` or ``float``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Sequence

from .errors import CapExceeded, DimensionMismatch, RouteDisagreement
from .field import DEFAULT_TOL, close, coerce
from .multivariate import (
    CanonicalTable,
    PolySystem,
    SystemInversion,
    build_table,
    invert_system,
    lowest_path,
    series_w,
    system_residual,
)
from .oracles import composition_residual, lagrange_invert
from .series import MSeries, Series1
from .univariate import CanonicalBasis, InversionResult, as_series, compute_w, invert_series

ZERO = Fraction(0)
ONE = Fraction(1)


class SparseMatrix:
    __slots__ = ("shape", "rows")

    def __init__(self, shape: tuple, rows: dict | None = None):
        self.shape = shape
        self.rows = {}
        for i, row in (rows or {}).items():
            clean = {j: v for j, v in row.items() if v != 0}
            if clean:
                self.rows[i] = clean

    @classmethod
    def identity(cls, n: int) -> SparseMatrix:
        return cls((n, n), {i: {i: ONE} for i in range(n)})

    @classmethod
    def diag(cls, values: Sequence) -> SparseMatrix:
        n = len(values)
        return cls((n, n), {i: {i: coerce(v)} for i, v in enumerate(values)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> SparseMatrix:
        ncols = len(rows[0]) if rows else 0
        return cls((len(rows), ncols), {i: {j: coerce(v) for j, v in enumerate(r)} for i, r in enumerate(rows)})

    def to_dense(self) -> list:
        r, c = self.shape
        out = [[ZERO] * c for _ in range(r)]
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j, ZERO)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self):
        return f"SparseMatrix({self.shape}, nnz={sum(len(r) for r in self.rows.values())})"

    def __add__(self, other: SparseMatrix) -> SparseMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        out = {i: dict(r) for i, r in self.rows.items()}
        for i, row in other.rows.items():
            tgt = out.setdefault(i, {})
            for j, v in row.items():
                tgt[j] = tgt.get(j, ZERO) + v
        return SparseMatrix(self.shape, out)

    def __sub__(self, other: SparseMatrix) -> SparseMatrix:
        return self + other.scale(-1)

    def scale(self, c) -> SparseMatrix:
        return SparseMatrix(self.shape, {i: {j: v * c for j, v in r.items()} for i, r in self.rows.items()})

    def __matmul__(self, other: SparseMatrix) -> SparseMatrix:
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        out = {}
        for i, row in self.rows.items():
            acc: dict = {}
            for k, a in row.items():
                for j, b in other.rows.get(k, {}).items():
                    acc[j] = acc.get(j, ZERO) + a * b
            out[i] = acc
        return SparseMatrix((self.shape[0], other.shape[1]), out)

    def matvec(self, vec: Sequence) -> list:
        out = [ZERO] * self.shape[0]
        for i, row in self.rows.items():
            acc = ZERO
            for j, v in row.items():
                if vec[j] != 0:
                    acc += v * vec[j]
            out[i] = acc
        return out

    def vecmat(self, vec: Sequence) -> list:
        out = [ZERO] * self.shape[1]
        for i, row in self.rows.items():
            if vec[i] == 0:
                continue
            for j, v in row.items():
                out[j] += vec[i] * v
        return out


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    (ra, ca), (rb, cb) = a.shape, b.shape
    out: dict = {}
    for i1, row1 in a.rows.items():
        for i2, row2 in b.rows.items():
            tgt = out.setdefault(i1 * rb + i2, {})
            for j1, v1 in row1.items():
                for j2, v2 in row2.items():
                    tgt[j1 * cb + j2] = v1 * v2
    return SparseMatrix((ra * rb, ca * cb), out)


# ---------------------------------------------------------------------------
# coefficient recursion


@dataclass(frozen=True)
class PwqSet:
    n: int
    Wmat: SparseMatrix
    P: SparseMatrix
    M: SparseMatrix
    Q: SparseMatrix


def pwq_matrices(w: Sequence, n: int) -> PwqSet:
    """``Wmat[i][j] = w_(i-j+1)`` (1-based, zero when the index is negative)."""
    if n < 1:
        raise ValueError("order must be at least 1")
    if len(w) < n + 1:
        w = list(w) + [0] * (n + 1 - len(w))
    w = [coerce(c) for c in w]
    rows = {}
    for i in range(1, n + 1):
        rows[i - 1] = {j - 1: w[i - j + 1] for j in range(1, min(i + 1, n) + 1)}
    Wmat = SparseMatrix((n, n), rows)
    P = SparseMatrix.diag([math.factorial(k) for k in range(1, n + 1)])
    M = SparseMatrix.diag(list(range(1, n + 1)))
    Q = SparseMatrix.diag([Fraction(1, math.factorial(k - 1)) for k in range(1, n + 1)])
    return PwqSet(n, Wmat, P, M, Q)


def pwq_basis(w: Sequence, n: int) -> CanonicalBasis:
    """Canonical polynomials from the recursion on x-coefficient row vectors.

    Start from ``w_0 e_1`` (that is ``y_1``), multiply once by ``Wmat``, then
    repeatedly by ``M Wmat``; each iterate times ``Q`` is the next
    ``[c_1 .. c_n]``.
    """
    mats = pwq_matrices(w, n)
    MW = mats.M @ mats.Wmat
    first = [ZERO] * n
    first[0] = coerce(w[0])
    iterates = [first]
    if n >= 2:
        s = mats.Wmat.vecmat(first)
        iterates.append(mats.Q.vecmat(s))
        for _ in range(n - 2):
            s = MW.vecmat(s)
            iterates.append(mats.Q.vecmat(s))
    rows = [(ONE,) + (ZERO,) * n]
    rows += [(ZERO,) + tuple(c) for c in iterates]
    return CanonicalBasis(n, tuple(rows))


def pwq_invert(w: Sequence, n: int) -> Series1:
    """``U`` through order ``n`` from the first component of each iterate."""
    basis = pwq_basis(w, n)
    return Series1((ZERO,) + tuple(basis.rows[k][1] / math.factorial(k) for k in range(1, n + 1)))


# ---------------------------------------------------------------------------
# operator matrices


@dataclass(frozen=True)
class OperatorMatrices:
    """Differentiation and cut-off multiplication by x on ``1, x, .., x^n``."""

    n: int
    Dbar: SparseMatrix
    Xbar: SparseMatrix


def operator_matrices(n: int) -> OperatorMatrices:
    size = n + 1
    D = SparseMatrix((size, size), {i: {i + 1: Fraction(i + 1)} for i in range(n)})
    X = SparseMatrix((size, size), {i: {i - 1: ONE} for i in range(1, size)})
    return OperatorMatrices(n, D, X)


def _poly_in_matrix(coeffs: Sequence, A: SparseMatrix) -> SparseMatrix:
    size = A.shape[0]
    total = SparseMatrix((size, size))
    power = SparseMatrix.identity(size)
    for j, c in enumerate(coeffs):
        if j:
            power = power @ A
            if not power.rows:
                break
        if c != 0:
            total = total + power.scale(c)
    return total


def ybar_matrix(W: Series1, n: int) -> SparseMatrix:
    """``Xbar (sum_j w_j Dbar^j)``."""
    if W.order < n - 1:
        raise ValueError(f"W must be known through order {n - 1}")
    ops = operator_matrices(n)
    return ops.Xbar @ _poly_in_matrix(W.coeffs[: n + 1], ops.Dbar)


def ybar_iterate(W: Series1, n: int) -> CanonicalBasis:
    Y = ybar_matrix(W, n)
    vec = [ONE] + [ZERO] * n
    rows = [tuple(vec)]
    for _ in range(n):
        vec = Y.matvec(vec)
        rows.append(tuple(vec))
    return CanonicalBasis(n, tuple(rows))


def _basis_result(V: Series1, basis: CanonicalBasis, method: str, powers) -> InversionResult:
    pw = {m: basis.power_series(m) for m in sorted(set(powers) | {1})}
    return InversionResult(basis.order, pw, method, composition_residual(V, pw[1], basis.order))


def pwq_route(V, N: int, powers: Sequence[int] = (1,)) -> InversionResult:
    V = as_series(V, N)
    W = compute_w(V, N)
    return _basis_result(V, pwq_basis(W.coeffs, N), "pwq", powers)


def matrix_op_route(V, N: int, powers: Sequence[int] = (1,)) -> InversionResult:
    V = as_series(V, N)
    W = compute_w(V, N)
    return _basis_result(V, ybar_iterate(W, N), "matrix-op", powers)


def lagrange_route(V, N: int, powers: Sequence[int] = (1,)) -> InversionResult:
    V = as_series(V, N)
    U = lagrange_invert(V, N)
    pw = {m: U**m for m in sorted(set(powers) | {1})}
    return InversionResult(N, pw, "lagrange", composition_residual(V, U, N))


# ---------------------------------------------------------------------------
# several variables


def kron_operator(nvars: int, n: int, which: str, index: int) -> SparseMatrix:
    """``I (x) .. (x) Dbar (x) .. (x) I`` with the factor at ``index``.

    ``which`` is ``"D"`` or ``"X"``. The tensor basis orders exponent tuples
    with variable 0 varying slowest.
    """
    if nvars < 1:
        raise ValueError("nvars must be positive")
    if not 0 <= index < nvars:
        raise IndexError(f"variable {index} out of range for {nvars} variables")
    ops = operator_matrices(n)
    factor = {"D": ops.Dbar, "X": ops.Xbar}[which]
    eye = SparseMatrix.identity(n + 1)
    return reduce(kron, [factor if k == index else eye for k in range(nvars)])


def tensor_index(exps: Sequence[int], n: int) -> int:
    idx = 0
    for e in exps:
        idx = idx * (n + 1) + e
    return idx


def tensor_exponents(idx: int, nvars: int, n: int) -> tuple:
    out = []
    for _ in range(nvars):
        idx, e = divmod(idx, n + 1)
        out.append(e)
    return tuple(reversed(out))


def kron_raising_matrices(W, n: int) -> list:
    """``Ybar_i = sum_k Xbar_k W_ki(Dbar_0, .., Dbar_{N-1})`` for each ``i``."""
    nv = W.dim
    Ds = [kron_operator(nv, n, "D", j) for j in range(nv)]
    Xs = [kron_operator(nv, n, "X", k) for k in range(nv)]
    size = (n + 1) ** nv
    # powers of each Dbar_j, computed once
    dpow = [[SparseMatrix.identity(size)] for _ in range(nv)]

    def d_monomial(a):
        m = None
        for j, e in enumerate(a):
            while len(dpow[j]) <= e:
                dpow[j].append(dpow[j][-1] @ Ds[j])
            if e:
                m = dpow[j][e] if m is None else m @ dpow[j][e]
        return m if m is not None else SparseMatrix.identity(size)

    out = []
    for i in range(nv):
        Y = SparseMatrix((size, size))
        for k in range(nv):
            op = SparseMatrix((size, size))
            for a, c in W[k, i].terms.items():
                if sum(a) <= n:
                    op = op + d_monomial(a).scale(c)
            Y = Y + Xs[k] @ op
        out.append(Y)
    return out


def multivariate_matrix_invert(V: PolySystem, order: int, kron_cap: int | None = None) -> SystemInversion:
    """Same contract as ``invert_system`` but through Kronecker matrices."""
    nv = V.nvars
    size = (order + 1) ** nv
    if kron_cap is not None and size > kron_cap:
        raise CapExceeded(f"Kronecker space of dimension {size} exceeds cap {kron_cap}")
    W = series_w(V, order)
    Ys = kron_raising_matrices(W, order)
    e1 = [ONE] + [ZERO] * (size - 1)
    vecs = build_table(lambda i, v: Ys[i].matvec(v), e1, nv, order, lowest_path)
    entries = {}
    for idx, vec in vecs.items():
        terms = {tensor_exponents(j, nv, order): c for j, c in enumerate(vec) if c != 0}
        entries[idx] = MSeries(nv, order, terms)
    table = CanonicalTable(nv, order, entries)
    U = table.components()
    return SystemInversion(order, U, "matrix-op", system_residual(V, U, order))


# ---------------------------------------------------------------------------
# benchmark


UNIVARIATE_ROUTES: dict = {
    "operator": invert_series,
    "pwq": pwq_route,
    "matrix-op": matrix_op_route,
    "lagrange": lagrange_route,
}

SYSTEM_ROUTES: dict = {
    "operator": invert_system,
    "matrix-op": multivariate_matrix_invert,
}


def _coeff_vector(result) -> list:
    if isinstance(result, InversionResult):
        return list(result.U.coeffs)
    return [dict(u.terms) for u in result.components]


def max_discrepancy(results: Sequence):
    """Largest coefficient difference between any result and the first."""
    base = _coeff_vector(results[0])
    worst = ZERO
    for r in results[1:]:
        other = _coeff_vector(r)
        if isinstance(base[0], dict):
            for a, b in zip(base, other):
                for key in set(a) | set(b):
                    worst = max(worst, abs(a.get(key, ZERO) - b.get(key, ZERO)))
        else:
            for a, b in zip(base, other):
                worst = max(worst, abs(a - b))
    return worst


def bench_methods(problem, orders: Sequence[int], methods: Sequence[str] | None = None,
                  tol: float = DEFAULT_TOL, clock: Callable[[], int] = time.perf_counter_ns) -> list:
    """Time each route at each order; returns ``(method, order, ns)`` rows.

    ``problem`` is a univariate series / coefficient list or a ``PolySystem``.
    Raises ``RouteDisagreement`` if the routes do not produce the same inverse.
    """
    routes = SYSTEM_ROUTES if isinstance(problem, PolySystem) else UNIVARIATE_ROUTES
    names = list(methods or routes)
    rows = []
    for order in orders:
        results = []
        for name in names:
            t0 = clock()
            res = routes[name](problem, order)
            rows.append((name, order, clock() - t0))
            results.append(res)
        gap = max_discrepancy(results)
        if not close(gap, ZERO, tol):
            raise RouteDisagreement(f"routes disagree at order {order} by {gap}")
    return rows
