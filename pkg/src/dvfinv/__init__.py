"""Local inversion of analytic maps via raising operators and canonical polynomials."""

from .errors import (
    CapExceeded,
    DerivativeVanishesAtPoint,
    DimensionMismatch,
    InnerConstantNonzero,
    InversionError,
    NotNormalized,
    OrderExhausted,
    PointMismatch,
    RouteDisagreement,
    SingularAtOrigin,
    SingularDerivative,
    ZeroConstantTerm,
)
from .matrix import (
    bench_methods,
    kron_operator,
    lagrange_route,
    matrix_op_route,
    multivariate_matrix_invert,
    pwq_invert,
    pwq_route,
    ybar_iterate,
    ybar_matrix,
)
from .multivariate import PolySystem, canonical_table, invert_system, jacobian, raising_apply
from .oracles import (
    chebyshev_u,
    composition_residual,
    lagrange_invert,
    t3_inverse_closed_form,
    w_period8_closed_form,
)
from .series import MSeries, Series1, SeriesMatrix, ms_invert_matrix
from .univariate import (
    CanonicalBasis,
    InversionResult,
    canonical_polynomials,
    compute_w,
    inverse_power,
    invert_series,
    raising_step,
    shift_invert,
)

__version__ = "0.1.0"
