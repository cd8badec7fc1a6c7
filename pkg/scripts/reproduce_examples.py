"""Print the worked examples next to the values computed here.

    python scripts/reproduce_examples.py
"""

import math
from fractions import Fraction as F

from dvfinv.matrix import multivariate_matrix_invert
from dvfinv.multivariate import PolySystem, canonical_table, invert_system
from dvfinv.oracles import t3_inverse_closed_form
from dvfinv.univariate import canonical_polynomials, invert_series, shift_invert

R2 = math.sqrt(2)


def show_poly(coeffs, var="x"):
    terms = [f"{c}*{var}^{j}" for j, c in enumerate(coeffs) if c != 0]
    return " + ".join(terms) or "0"


def cubic_period8():
    print("cubic z^3/3 - z^2/sqrt2 + z, order 6 (float)")
    basis = canonical_polynomials([0, 1, -1 / R2, F(1, 3)], 6)
    for k in range(2, 7):
        pretty = ", ".join(f"{float(c):.6g}" for c in basis.rows[k][: k + 1])
        print(f"  y_{k}: [{pretty}]")
    U = invert_series([0, 1, -1 / R2, F(1, 3)], 6)
    print("  U:", ", ".join(f"{float(c):.10f}" for c in U.U.coeffs), " residual", f"{float(U.residual):.2e}")


def t3():
    print("T3 = 4z^3 - 3z, order 15")
    res = invert_series([0, -3, 0, 4], 15)
    print("  U:", show_poly(res.U.coeffs, "v"))
    print("  closed form agrees:", res.U == t3_inverse_closed_form(15))


def quad_pair():
    print("V1 = z1 + z2^2/2, V2 = z2 - z1 z2, order 2")
    V = PolySystem.from_terms([{(1, 0): 1, (0, 2): F(1, 2)}, {(0, 1): 1, (1, 1): -1}])
    table = canonical_table(V, 2)
    for n, y in table.entries.items():
        print(f"  y_{n}: {y}")
    U = invert_system(V, 2)
    for k, u in enumerate(U, 1):
        print(f"  U_{k}: {u}")
    print("  residual:", U.residual, " Kronecker route agrees:", list(multivariate_matrix_invert(V, 2)) == list(U))


def sqrt_shift():
    print("z^2 near z0 = 1, v0 = 1, order 3")
    res = shift_invert([0, 0, 1], 1, 1, 3)
    print("  U:", show_poly(res.expansion().coeffs, "(v-1)"), " residual", res.residual)


if __name__ == "__main__":
    for fn in (cubic_period8, t3, quad_pair, sqrt_shift):
        fn()
        print()
