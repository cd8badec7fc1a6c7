"""Command line front end.

    dvfinv invert problem.json [--order N] [--method M] [--mode rational|float] [--out result.json] [--kron-cap K]
    dvfinv bench problem.json --orders 8,16,32 [--csv out.csv]

Exit codes: 0 success, 2 usage, 3 schema error, 4 validation error,
5 numeric failure. A residual above tolerance counts as numeric, as does
an oversized Kronecker space.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import matrix, univariate
from .errors import CapExceeded, InversionError, RouteDisagreement
from .field import DEFAULT_TOL, FLOAT, RATIONAL, close, format_coeff
from .multivariate import PolySystem, SystemInversion, jacobian, shift_system
from .series import MSeries, Series1, invert_constant_matrix

EXIT_OK = 0
EXIT_SCHEMA = 3
EXIT_VALIDATION = 4
EXIT_NUMERIC = 5

METHODS = ("operator", "pwq", "matrix-op", "lagrange")
SYSTEM_METHODS = ("operator", "matrix-op")
DEFAULT_KRON_CAP = 200_000


class SchemaError(ValueError):
    code = "schema"


class ValidationError(ValueError):
    code = "validation"


FLOAT_TOKENS = {
    "sqrt2": math.sqrt(2.0),
    "pi": math.pi,
    "cos(pi/4)": math.cos(math.pi / 4),
}

_ATOM = re.compile(r"\s*(cos\(pi/4\)|sqrt2|pi|[0-9]+(?:\.[0-9]*)?(?:[eE][-+]?[0-9]+)?)\s*")


def parse_value(raw, mode: str):
    """One coefficient. Rational mode: ints and ``"p/q"`` strings only."""
    if isinstance(raw, bool):
        raise SchemaError(f"boolean is not a coefficient: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw) if mode == RATIONAL else float(raw)
    if isinstance(raw, float):
        if mode == RATIONAL:
            raise SchemaError(f"float {raw!r} in rational mode; quote it as an exact fraction")
        return raw
    if not isinstance(raw, str):
        raise SchemaError(f"coefficient must be a string or number, got {raw!r}")
    if mode == RATIONAL:
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not an exact fraction: {raw!r}") from exc
    return _parse_float_expr(raw)


def _parse_float_expr(text: str) -> float:
    # [-] atom ([*/] atom)*, evaluated left to right
    s = text.strip()
    sign = 1.0
    if s.startswith("-"):
        sign, s = -1.0, s[1:]
    pos, value, op = 0, None, "*"
    while True:
        m = _ATOM.match(s, pos)
        if not m:
            raise SchemaError(f"cannot parse float coefficient {text!r}")
        tok = m.group(1)
        atom = FLOAT_TOKENS[tok] if tok in FLOAT_TOKENS else float(tok)
        if value is None:
            value = atom
        elif op == "*":
            value *= atom
        else:
            value /= atom
        pos = m.end()
        if pos == len(s):
            return sign * value
        op = s[pos]
        if op not in "*/":
            raise SchemaError(f"cannot parse float coefficient {text!r}")
        pos += 1


@dataclass
class ProblemSpec:
    kind: str
    order: int
    method: str = "operator"
    mode: str = RATIONAL
    coeffs: Optional[list] = None  # univariate: dense coefficient list
    components: Optional[list] = None  # multivariate: list of {multi-index: value}
    powers: list = field(default_factory=list)
    shift: Optional[tuple] = None
    raw: dict = field(default_factory=dict, repr=False)

    def poly(self) -> list:
        return list(self.coeffs)

    def system(self) -> PolySystem:
        return PolySystem.from_terms(self.components)


def _require(cond, msg):
    if not cond:
        raise SchemaError(msg)


def parse_problem(text_or_doc, order: int | None = None, method: str | None = None,
                  mode: str | None = None) -> ProblemSpec:
    """Parse and validate a problem document; keyword arguments override it."""
    if isinstance(text_or_doc, (str, bytes)):
        try:
            doc = json.loads(text_or_doc)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    else:
        doc = text_or_doc
    _require(isinstance(doc, dict), "problem must be a JSON object")
    kind = doc.get("kind")
    _require(kind in ("univariate", "multivariate"), f"kind must be univariate or multivariate, got {kind!r}")
    order = order if order is not None else doc.get("order")
    _require(isinstance(order, int) and not isinstance(order, bool) and order >= 1, f"order must be an integer >= 1, got {order!r}")
    method = method or doc.get("method", "operator")
    allowed = (METHODS if kind == "univariate" else SYSTEM_METHODS) + ("all",)
    _require(method in allowed, f"method {method!r} not one of {allowed}")
    mode = mode or doc.get("mode", RATIONAL)
    _require(mode in (RATIONAL, FLOAT), f"mode must be rational or float, got {mode!r}")
    powers = doc.get("powers") or []
    _require(isinstance(powers, list) and all(isinstance(m, int) and 1 <= m <= order for m in powers),
             f"powers must be integers in 1..{order}")

    spec = ProblemSpec(kind, order, method, mode, powers=list(powers), raw=doc)
    if kind == "univariate":
        pairs = doc.get("coeffs")
        _require(isinstance(pairs, list) and pairs, "univariate problems need a non-empty 'coeffs' list")
        dense: dict = {}
        for pair in pairs:
            _require(isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], int) and pair[0] >= 0,
                     f"coefficient entries are [degree, value], got {pair!r}")
            dense[pair[0]] = dense.get(pair[0], 0) + parse_value(pair[1], mode)
        deg = max((j for j, c in dense.items() if c != 0), default=0)
        spec.coeffs = [dense.get(j, 0 if mode == RATIONAL else 0.0) for j in range(deg + 1)]
        spec.coeffs = [Fraction(c) if mode == RATIONAL else float(c) for c in spec.coeffs]
    else:
        comps = doc.get("components")
        _require(isinstance(comps, list) and comps, "multivariate problems need a non-empty 'components' list")
        nv = len(comps)
        parsed = []
        for comp in comps:
            _require(isinstance(comp, list), "each component is a list of [multi-index, value] terms")
            terms: dict = {}
            for term in comp:
                _require(isinstance(term, list) and len(term) == 2 and isinstance(term[0], list)
                         and len(term[0]) == nv and all(isinstance(e, int) and e >= 0 for e in term[0]),
                         f"terms are [[e1..eN], value] with N = {nv}, got {term!r}")
                idx = tuple(term[0])
                terms[idx] = terms.get(idx, 0) + parse_value(term[1], mode)
            parsed.append(terms)
        spec.components = parsed

    shift = doc.get("shift")
    if shift is not None:
        _require(isinstance(shift, dict) and "z0" in shift and "v0" in shift, "shift is {\"z0\": .., \"v0\": ..}")
        if kind == "univariate":
            spec.shift = (parse_value(shift["z0"], mode), parse_value(shift["v0"], mode))
        else:
            _require(isinstance(shift["z0"], list) and isinstance(shift["v0"], list), "multivariate shift points are lists")
            spec.shift = (tuple(parse_value(c, mode) for c in shift["z0"]),
                          tuple(parse_value(c, mode) for c in shift["v0"]))
    _validate(spec)
    return spec


def _validate(spec: ProblemSpec):
    try:
        if spec.kind == "univariate":
            V = spec.coeffs
            if spec.shift is None:
                if V[0] != 0:
                    raise ValidationError(
                        "V(0) != 0: re-centre by supplying \"shift\": {\"z0\": z0, \"v0\": V(z0)}")
                if len(V) < 2 or V[1] == 0:
                    raise ValidationError("V'(0) = 0: the map is not locally invertible at the origin")
            else:
                z0, v0 = spec.shift
                shifted = univariate.taylor_shift(V, z0)
                if not close(shifted[0], v0, DEFAULT_TOL):
                    raise ValidationError(f"V(z0) = {shifted[0]} does not equal v0 = {v0}")
                if len(shifted) < 2 or shifted[1] == 0:
                    raise ValidationError(f"V'(z0) = 0 at z0 = {z0}")
        else:
            system = spec.system()
            if spec.shift is not None:
                z0, v0 = spec.shift
                system = shift_system(system, z0)
                for k, comp in enumerate(system.components):
                    if not close(comp.constant_term, v0[k], DEFAULT_TOL):
                        raise ValidationError(f"V_{k}(z0) = {comp.constant_term} does not equal v0[{k}] = {v0[k]}")
            else:
                for k, comp in enumerate(system.components):
                    if comp.constant_term != 0:
                        raise ValidationError(
                            f"V_{k}(0) != 0: re-centre by supplying \"shift\": {{\"z0\": [...], \"v0\": [...]}}")
            invert_constant_matrix(jacobian(system).constant_part())
    except InversionError as exc:
        raise ValidationError(str(exc)) from exc


# ---------------------------------------------------------------------------
# running


def _local_univariate(spec: ProblemSpec) -> list:
    V = spec.poly()
    if spec.shift is not None:
        V = list(univariate.taylor_shift(V, spec.shift[0]))
        V[0] = type(V[0])(0)
    return V


def _local_system(spec: ProblemSpec) -> PolySystem:
    system = spec.system()
    if spec.shift is None:
        return system
    shifted = shift_system(system, spec.shift[0])
    comps = [MSeries(c.nvars, c.order, {i: v for i, v in c.terms.items() if any(i)}) for c in shifted.components]
    return PolySystem(tuple(comps))


def _fmt(c, mode: str):
    return float(c) if mode == FLOAT else format_coeff(c)


def _series_json(s: Series1, mode: str) -> list:
    return [_fmt(c, mode) for c in s.coeffs]


def _mseries_json(s: MSeries, mode: str) -> dict:
    items = sorted(s.terms.items(), key=lambda t: (sum(t[0]), t[0]))
    return {",".join(map(str, idx)): _fmt(c, mode) for idx, c in items}


def _run_method(spec: ProblemSpec, name: str, kron_cap: int):
    t0 = time.perf_counter_ns()
    if spec.kind == "univariate":
        V = _local_univariate(spec)
        res = matrix.UNIVARIATE_ROUTES[name](V, spec.order, spec.powers or (1,))
    else:
        system = _local_system(spec)
        if name == "matrix-op":
            res = matrix.multivariate_matrix_invert(system, spec.order, kron_cap=kron_cap)
        else:
            res = matrix.SYSTEM_ROUTES[name](system, spec.order)
    return res, time.perf_counter_ns() - t0


def _result_json(spec: ProblemSpec, res, ns: int) -> dict:
    mode = spec.mode
    out: dict = {"residual": _fmt(res.residual, mode), "ns": ns}
    z0 = spec.shift[0] if spec.shift is not None else None
    if isinstance(res, SystemInversion):
        comps = list(res.components)
        if z0 is not None:
            comps = [u + z0[k] for k, u in enumerate(comps)]
        out["U"] = [_mseries_json(u, mode) for u in comps]
    else:
        out["U"] = _series_json(res.U if z0 is None else res.U + z0, mode)
        if spec.powers:
            out["powers"] = {str(m): _series_json(res.powers[m], mode) for m in spec.powers}
    if spec.shift is not None:
        # U(v) = z0 + U_1(v - v0); U above includes z0, powers are of U_1
        out["center"] = {"z0": _center_json(spec.shift[0], mode), "v0": _center_json(spec.shift[1], mode)}
        out["local_variable"] = "v - v0"
    return out


def _center_json(c, mode: str = RATIONAL):
    if isinstance(c, tuple):
        return [_fmt(x, mode) for x in c]
    return _fmt(c, mode)


def run(spec: ProblemSpec, kron_cap: int = DEFAULT_KRON_CAP) -> dict:
    """Run the requested method(s) and build the result document."""
    if spec.method == "all":
        names = list(METHODS if spec.kind == "univariate" else SYSTEM_METHODS)
    else:
        names = [spec.method]
    results, doc = [], {"method_results": {}}
    for name in sorted(names):
        res, ns = _run_method(spec, name, kron_cap)
        results.append(res)
        doc["method_results"][name] = _result_json(spec, res, ns)
    if len(results) > 1:
        doc["discrepancy"] = _fmt(matrix.max_discrepancy(results), spec.mode)
    doc["order"] = spec.order
    doc["mode"] = spec.mode
    return doc


def emit_problem(spec: ProblemSpec) -> dict:
    """Inverse of ``parse_problem``: a document that parses back to the same problem."""
    doc: dict = {"kind": spec.kind, "order": spec.order, "method": spec.method, "mode": spec.mode}
    if spec.kind == "univariate":
        doc["coeffs"] = [[j, _fmt(c, spec.mode)] for j, c in enumerate(spec.coeffs) if c != 0]
    else:
        doc["components"] = [[[list(i), _fmt(c, spec.mode)] for i, c in sorted(t.items())] for t in spec.components]
    if spec.powers:
        doc["powers"] = list(spec.powers)
    if spec.shift is not None:
        doc["shift"] = {"z0": _center_json(spec.shift[0], spec.mode), "v0": _center_json(spec.shift[1], spec.mode)}
    return doc


def _numeric_failure(doc: dict, mode: str) -> Optional[str]:
    tol = 0 if mode == RATIONAL else DEFAULT_TOL
    for name, r in doc["method_results"].items():
        res = Fraction(r["residual"]) if isinstance(r["residual"], str) else r["residual"]
        if abs(res) > tol:
            return f"{name}: composition residual {r['residual']}"
    if "discrepancy" in doc:
        d = doc["discrepancy"]
        d = Fraction(d) if isinstance(d, str) else d
        if abs(d) > tol:
            return f"routes disagree by {doc['discrepancy']}"
    return None


# ---------------------------------------------------------------------------
# entry points


def _load(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def cmd_invert(args) -> int:
    spec = parse_problem(_load(args.input), order=args.order, method=args.method, mode=args.mode)
    doc = run(spec, kron_cap=args.kron_cap)
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    problem = _numeric_failure(doc, spec.mode)
    if problem:
        print(f"error [numeric]: {problem}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        orders = [int(o) for o in args.orders.split(",") if o.strip()]
    except ValueError as exc:
        raise SchemaError(f"bad --orders {args.orders!r}") from exc
    if not orders or min(orders) < 1:
        raise SchemaError("--orders needs positive integers")
    spec = parse_problem(_load(args.input), mode=args.mode, order=max(orders))
    problem = _local_univariate(spec) if spec.kind == "univariate" else _local_system(spec)
    methods = None if spec.method in ("all", "operator") else [spec.method]
    rows = matrix.bench_methods(problem, orders, methods)
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["method", "order", "nanoseconds"])
        writer.writerows(rows)
    finally:
        if args.csv:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dvfinv", description="Local inversion of analytic maps by raising operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invert", help="expand the local inverse of a map")
    p.add_argument("input")
    p.add_argument("--order", type=int)
    p.add_argument("--method", choices=METHODS + ("all",))
    p.add_argument("--mode", choices=(RATIONAL, FLOAT))
    p.add_argument("--out")
    p.add_argument("--kron-cap", type=int, default=DEFAULT_KRON_CAP,
                   help="largest Kronecker space dimension (n+1)^N the matrix route may build")
    p.set_defaults(func=cmd_invert)

    b = sub.add_parser("bench", help="time every route at several orders")
    b.add_argument("input")
    b.add_argument("--orders", default="8,16,32")
    b.add_argument("--csv")
    b.add_argument("--mode", choices=(RATIONAL, FLOAT))
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error [schema]: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ValidationError as exc:
        print(f"error [validation]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RouteDisagreement, CapExceeded) as exc:
        print(f"error [numeric/{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InversionError as exc:
        print(f"error [validation/{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error [validation]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
