"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import csv
import functools
import json
import math
import random
import time
from fractions import Fraction as F

from dvfinv.cli import main
from dvfinv.matrix import lagrange_route, matrix_op_route, multivariate_matrix_invert, pwq_route
from dvfinv.multivariate import PolySystem, canonical_table, invert_system, lowering_apply as mv_lowering
from dvfinv.multivariate import series_w, system_residual
from dvfinv.oracles import chebyshev_u, composition_residual, lagrange_invert, t3_inverse_closed_form, w_period8_closed_form
from dvfinv.series import MSeries, Series1, multi_indices, s1_pow
from dvfinv.univariate import (
    canonical_polynomials,
    compute_w,
    inverse_power,
    invert_series,
    lowering_apply,
    shift_invert,
)
from dvfinv.errors import SingularAtOrigin

from conftest import ACCEPTANCE_RESULTS, T3, T3_U7, random_poly

R2 = math.sqrt(2)
FLOAT_TOL = 1e-10
PERIOD_TOL = 1e-12
N_RANDOM = 100
SEED = 20261016


def criterion(num, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                ACCEPTANCE_RESULTS[num] = (title, False, f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
                raise
            ACCEPTANCE_RESULTS[num] = (title, True, detail or "")
        return wrapper
    return deco


def random_polys():
    rng = random.Random(SEED)
    return [random_poly(rng, 5) for _ in range(N_RANDOM)]


@criterion(1, "T3 = 4z^3 - 3z: four routes give the same exact inverse, each under 1 s")
def test_c01_t3_all_routes():
    expected = Series1(T3_U7)
    timings = {}
    for route in (invert_series, pwq_route, matrix_op_route, lagrange_route):
        t0 = time.perf_counter()
        res = route(T3, 7)
        timings[res.method] = time.perf_counter() - t0
        assert res.U == expected, res.method
        assert res.residual == 0
    assert max(timings.values()) < 1.0, timings
    return "slowest %.3f s" % max(timings.values())


@criterion(2, "T3 closed form: invert_series(T3, 15) == binomial series")
def test_c02_t3_closed_form():
    assert invert_series(T3, 15).U == t3_inverse_closed_form(15)


CUBIC_Y = {
    2: [0, R2, 1],
    3: [0, 4, 3 * R2, 1],
    4: [0, 10 * R2, 22, 6 * R2, 1],
    5: [0, 40, 90 * R2, 70, 10 * R2, 1],
    6: [0, -140 * R2, 700, 420 * R2, 170, 15 * R2, 1],
}


@criterion(3, "Cubic z^3/3 - z^2/sqrt2 + z (float, 1e-10): y_2..y_6 and U to order 6")
def test_c03_cubic():
    V = [0, 1, -1 / R2, F(1, 3)]
    basis = canonical_polynomials(V, 6)
    worst = 0.0
    for k, expected in CUBIC_Y.items():
        got = basis.rows[k]
        padded = expected + [0] * (len(got) - len(expected))
        worst = max(worst, max(abs(g - e) for g, e in zip(got, padded)))
    assert worst <= FLOAT_TOL, worst
    U = invert_series(V, 6).U
    expected_U = [0, 1, R2 / 2, F(2, 3), 5 * R2 / 12, F(1, 3), -7 * R2 / 36]
    err = max(abs(a - b) for a, b in zip(U.coeffs, expected_U))
    assert err <= FLOAT_TOL, err
    return "max err %.1e" % max(worst, err)


@criterion(4, "Chebyshev structure of W: exact for rational alpha, period 8 at cos(pi/4)")
def test_c04_chebyshev():
    for alpha in (F(0), F(1, 2), F(3, 5)):
        W = compute_w([0, 1, -alpha, F(1, 3)], 13)
        assert [W[n] for n in range(13)] == [chebyshev_u(alpha, n) for n in range(13)], alpha
    alpha = math.cos(math.pi / 4)
    W = compute_w([0, 1, -alpha, F(1, 3)], 25)
    closed = w_period8_closed_form(24)
    for n in range(25):
        assert abs(W[n] - closed[n]) <= PERIOD_TOL, n
    for n in range(25 - 8):
        assert abs(W[n + 8] - W[n]) <= PERIOD_TOL, n


@criterion(5, "Quadratic pair: canonical table, U1 = v1 - v1^2/2, U2 = v2 + v1 v2, Kronecker route agrees")
def test_c05_quad_pair():
    V = PolySystem.from_terms([{(1, 0): 1, (0, 2): F(1, 2)}, {(0, 1): 1, (1, 1): -1}])
    t = canonical_table(V, 2)
    assert t[(0, 1)] == MSeries(2, 2, {(0, 1): 1})
    assert t[(1, 0)] == MSeries(2, 2, {(1, 0): 1})
    assert t[(0, 2)] == MSeries(2, 2, {(0, 2): 1, (1, 0): -1})
    assert t[(1, 1)] == MSeries(2, 2, {(0, 1): 1, (1, 1): 1})
    assert t[(2, 0)] == MSeries(2, 2, {(2, 0): 1})
    U = invert_system(V, 2)
    K = multivariate_matrix_invert(V, 2)
    assert list(K) == list(U)
    assert U[1] == MSeries(2, 2, {(0, 1): 1, (1, 1): 1})
    stated_U1 = MSeries(2, 2, {(1, 0): 1, (2, 0): F(-1, 2)})
    stated_residual = system_residual(V, [stated_U1, U[1]], 2)
    assert U[0] == stated_U1, (
        f"computed U1 = {U[0]} (residual {U.residual}); "
        f"stated U1 has composition residual {stated_residual}"
    )


@criterion(6, "Power columns: inverse_power(V, m, 10) == U^m, 100 random V, m = 1..5")
def test_c06_power_columns():
    for V in random_polys():
        U = invert_series(V, 10).U
        for m in range(1, 6):
            assert inverse_power(V, m, 10) == s1_pow(U, m), (V, m)
    return f"{N_RANDOM} polynomials"


@criterion(7, "Oracle equivalence: Lagrange == operator == PWQ == matrix-op, residual 0 through 10")
def test_c07_oracle_equivalence():
    for V in random_polys():
        oracle = lagrange_invert(Series1.from_poly(V, 10), 10)
        for route in (invert_series, pwq_route, matrix_op_route):
            res = route(V, 10)
            assert res.U == oracle, (V, res.method)
            assert res.residual == 0
        assert composition_residual(Series1.from_poly(V, 10), oracle, 10) == 0
    return f"{N_RANDOM} polynomials"


def _random_system(rng, nv):
    while True:
        comps = []
        for i in range(nv):
            terms = {tuple(int(k == j) for k in range(nv)): F(rng.randint(-2, 2)) for j in range(nv)}
            for idx in multi_indices(nv, 3):
                if sum(idx) >= 2 and rng.random() < 0.35:
                    terms[idx] = F(rng.randint(-3, 3), rng.randint(1, 3))
            comps.append(terms)
        V = PolySystem.from_terms(comps)
        try:
            series_w(V, 0)
            return V
        except SingularAtOrigin:
            continue


@criterion(8, "Lowering: V(D) y_n = n y_(n-1) (n <= 8); V_i(D) y_n = n_i y_(n-e_i) (|n| <= 5, N <= 3)")
def test_c08_lowering():
    for V in random_polys()[:20]:
        basis = canonical_polynomials(V, 8)
        for n in range(1, 9):
            lowered = lowering_apply(V, basis.rows[n])
            lowered = lowered + (0,) * (9 - len(lowered))
            assert lowered[:9] == tuple(n * c for c in basis.rows[n - 1])
    rng = random.Random(SEED)
    checked = 0
    for nv in (1, 2, 3):
        for _ in range(3):
            V = _random_system(rng, nv)
            t = canonical_table(V, 5)
            for n, y in t.entries.items():
                for i in range(nv):
                    if n[i]:
                        prev = tuple(e - (k == i) for k, e in enumerate(n))
                        assert mv_lowering(V, i, y).terms == (t[prev] * n[i]).terms
                        checked += 1
    return f"{checked} multivariate relations"


@criterion(9, "Shift: shift_invert(z^2, 1, 1, 3) = 1 + w/2 - w^2/8 + w^3/16, zero residual")
def test_c09_shift():
    res = shift_invert([0, 0, 1], 1, 1, 3)
    assert res.expansion() == Series1((1, F(1, 2), F(-1, 8), F(1, 16)))
    assert res.residual == 0


@criterion(10, "Benchmark: bench on T3 at 8,16,32 emits CSV, routes agree")
def test_c10_bench(tmp_path):
    problem = tmp_path / "t3.json"
    problem.write_text(json.dumps({"kind": "univariate", "coeffs": [[1, "-3"], [3, "4"]], "order": 7}))
    out = tmp_path / "bench.csv"
    assert main(["bench", str(problem), "--orders", "8,16,32", "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["method", "order", "nanoseconds"]
    methods = {r[0] for r in rows[1:]}
    assert methods == {"operator", "pwq", "matrix-op", "lagrange"}
    for m in methods:
        assert [int(r[1]) for r in rows[1:] if r[0] == m] == [8, 16, 32]
        assert all(int(r[2]) > 0 for r in rows[1:] if r[0] == m)
    for order in (8, 16, 32):
        Us = {route(T3, order).U for route in (invert_series, pwq_route, matrix_op_route, lagrange_route)}
        assert len(Us) == 1
    return f"{len(rows) - 1} timing rows"
