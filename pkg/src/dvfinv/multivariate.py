"""Inversion of polynomial maps C^N -> C^N.

The Jacobian ``V'`` is inverted as a matrix of truncated series, ``W``. The
raising operators ``Y_i = sum_k x_k W_ki(D)`` commute and build ``y_n`` for
every multi-index ``n``; the coefficient of ``x_k`` in ``y_n`` divided by
``n!`` is the coefficient of ``v^n`` in ``U_k``.

Variables are numbered from 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import DimensionMismatch, NotNormalized, OrderExhausted, PointMismatch
from .field import DEFAULT_TOL, close, coerce, max_abs
from .series import (
    MSeries,
    SeriesMatrix,
    mi_factorial,
    ms_add,
    ms_compose,
    ms_invert_matrix,
    ms_mul,
    ms_partial,
    multi_indices,
    unit_index,
)


@dataclass(frozen=True)
class PolySystem:
    """Components ``V_0 .. V_{N-1}``, each an exact polynomial."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("empty system")
        nv = comps[0].nvars
        if len(comps) != nv or any(c.nvars != nv for c in comps):
            raise DimensionMismatch("system must be square: N components in N variables")
        # store each component exactly, at its own degree
        comps = tuple(c.with_order(max(c.degree(), 1)) for c in comps)
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_terms(cls, components: Sequence[Mapping]) -> PolySystem:
        """Build from ``[{(1, 0): 1, (0, 2): 1/2}, ...]``."""
        nv = len(components)
        out = []
        for terms in components:
            deg = max((sum(i) for i in terms), default=1)
            out.append(MSeries(nv, max(deg, 1), terms))
        return cls(tuple(out))

    @property
    def nvars(self) -> int:
        return len(self.components)

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def check_normalized(self):
        for k, c in enumerate(self.components):
            if c.constant_term != 0:
                raise NotNormalized(f"V_{k}(0) != 0; shift the system first")


def jacobian(V: PolySystem, order: int | None = None) -> SeriesMatrix:
    """``(dV_i/dz_j)`` with entries truncated at ``order`` (exact by default)."""
    if order is None:
        order = max(V.degree() - 1, 0)
    rows = tuple(
        tuple(ms_partial(comp.with_order(order + 1), j) for j in range(V.nvars))
        for comp in V.components
    )
    return SeriesMatrix(rows)


def series_w(V: PolySystem, order: int) -> SeriesMatrix:
    """Inverse Jacobian through total degree ``order``."""
    V.check_normalized()
    return ms_invert_matrix(jacobian(V, order))


def apply_operator(w: MSeries, p: MSeries) -> MSeries:
    """``w(D) p``: each monomial ``z^a`` of ``w`` acts as ``D^a``."""
    d = p.degree()
    if d > w.order:
        raise OrderExhausted(f"operator known to order {w.order}, polynomial has degree {d}")
    out: dict = {}
    for a, c in w.terms.items():
        if sum(a) > d:
            continue
        for b, e in p.terms.items():
            if any(ai > bi for ai, bi in zip(a, b)):
                continue
            k = tuple(bi - ai for ai, bi in zip(a, b))
            scale = math.prod(math.perm(bi, ai) for ai, bi in zip(a, b))
            out[k] = out.get(k, 0) + c * e * scale
    return MSeries(p.nvars, p.order, out)


def _times_var(p: MSeries, k: int, order: int) -> MSeries:
    return MSeries(p.nvars, order, {tuple(e + (j == k) for j, e in enumerate(idx)): c for idx, c in p.terms.items()})


def raising_apply(W: SeriesMatrix, i: int, p: MSeries) -> MSeries:
    """``Y_i p = sum_k x_k W_ki(D) p``."""
    if not 0 <= i < W.dim:
        raise DimensionMismatch(f"raising operator {i} out of range")
    order = max(p.order, p.degree() + 1)
    result = MSeries(p.nvars, order)
    for k in range(W.dim):
        q = apply_operator(W[k, i], p)
        result = ms_add(result, _times_var(q, k, order))
    return result


def lowering_apply(V: PolySystem, i: int, p: MSeries) -> MSeries:
    """``V_i(D) p``."""
    comp = V.components[i].with_order(max(p.degree(), V.components[i].order))
    return apply_operator(comp, p)


@dataclass(frozen=True)
class CanonicalTable:
    """``entries[n] = y_n`` for all multi-indices with ``|n| <= order``."""

    nvars: int
    order: int
    entries: Mapping[tuple, MSeries]

    def __getitem__(self, n) -> MSeries:
        return self.entries[tuple(n)]

    def components(self) -> tuple:
        """Inverse components ``U_k(v) = sum_n [x_k] y_n v^n / n!``."""
        out = []
        for k in range(self.nvars):
            ek = unit_index(self.nvars, k)
            terms = {n: y[ek] / mi_factorial(n) for n, y in self.entries.items()}
            out.append(MSeries(self.nvars, self.order, terms))
        return tuple(out)


def lowest_path(n: tuple) -> int:
    """Raise along the lowest-numbered nonzero coordinate first."""
    return next(i for i, e in enumerate(n) if e)


def highest_path(n: tuple) -> int:
    return max(i for i, e in enumerate(n) if e)


def build_table(
    raise_fn: Callable[[int, object], object],
    one,
    nvars: int,
    order: int,
    path: Callable[[tuple], int] = lowest_path,
) -> dict:
    """Generic table construction; ``raise_fn(i, y)`` applies ``Y_i``.

    ``y_n`` is ``Y_i y_{n - e_i}`` with ``i = path(n)``.
    """
    table = {(0,) * nvars: one}
    for n in multi_indices(nvars, order):
        if not any(n):
            continue
        i = path(n)
        prev = tuple(e - (j == i) for j, e in enumerate(n))
        table[n] = raise_fn(i, table[prev])
    return table


def canonical_table(V: PolySystem, order: int, path: Callable[[tuple], int] = lowest_path) -> CanonicalTable:
    W = series_w(V, order)
    one = MSeries.constant(1, V.nvars, order)
    entries = build_table(lambda i, y: raising_apply(W, i, y).with_order(order), one, V.nvars, order, path)
    return CanonicalTable(V.nvars, order, entries)


@dataclass(frozen=True)
class SystemInversion:
    """Components ``U_0 .. U_{N-1}`` of the inverse map."""

    order: int
    components: tuple
    method: str
    residual: object
    center: tuple | None = None

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k) -> MSeries:
        return self.components[k]


def system_residual(V: PolySystem, U: Sequence[MSeries], order: int):
    """Max-norm of ``V_i(U(v)) - v_i`` over all components through ``order``."""
    worst = Fraction(0)
    nv = V.nvars
    for i, comp in enumerate(V.components):
        comp_u = ms_compose(comp.with_order(order), [u.with_order(order) for u in U])
        diff = ms_add(comp_u, -MSeries.var(i, nv, order))
        worst = max(worst, max_abs(diff.terms.values()))
    return worst


def invert_system(V: PolySystem, order: int) -> SystemInversion:
    """Inverse of ``V`` through total degree ``order``."""
    table = canonical_table(V, order)
    U = table.components()
    return SystemInversion(order, U, "operator", system_residual(V, U, order))


def shift_system(V: PolySystem, z0: Sequence) -> PolySystem:
    """Exact re-centring ``V(z + z0)``."""
    z0 = [coerce(c) for c in z0]
    nv = V.nvars
    if len(z0) != nv:
        raise DimensionMismatch("shift point has wrong dimension")
    shifted = []
    for comp in V.components:
        deg = comp.order
        subs = [MSeries(nv, deg, {(0,) * nv: z0[k], unit_index(nv, k): 1}) for k in range(nv)]
        shifted.append(_substitute_affine(comp, subs))
    return PolySystem(tuple(shifted))


def _substitute_affine(p: MSeries, subs: Sequence[MSeries]) -> MSeries:
    # ms_compose forbids constant terms in the inner series; expand by hand
    result = MSeries(p.nvars, p.order)
    for idx, c in p.terms.items():
        term = MSeries.constant(c, p.nvars, p.order)
        for k, e in enumerate(idx):
            for _ in range(e):
                term = ms_mul(term, subs[k])
        result = ms_add(result, term)
    return result


def shift_invert_system(V: PolySystem, z0: Sequence, v0: Sequence, order: int, tol: float = DEFAULT_TOL) -> SystemInversion:
    """Invert near ``z0``: ``U(v) = z0 + U_1(v - v0)``; components are ``U_1``."""
    shifted = shift_system(V, z0)
    comps = []
    for k, comp in enumerate(shifted.components):
        c0 = comp.constant_term
        if not close(c0, coerce(v0[k]), tol):
            raise PointMismatch(f"V_{k}(z0) = {c0} but v0 = {v0[k]}")
        comps.append(MSeries(comp.nvars, comp.order, {i: c for i, c in comp.terms.items() if any(i)}))
    local = PolySystem(tuple(comps))
    res = invert_system(local, order)
    return SystemInversion(order, res.components, res.method, res.residual, (tuple(z0), tuple(v0)))
