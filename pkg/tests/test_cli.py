import csv
import json
import math
import re
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dvfinv.cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_SCHEMA,
    EXIT_VALIDATION,
    SchemaError,
    ValidationError,
    emit_problem,
    main,
    parse_problem,
    parse_value,
    run,
)

from conftest import T3_U7, normalized_polys

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

T3_DOC = {"kind": "univariate", "coeffs": [[1, "-3"], [3, "4"]], "order": 7}
QUAD_DOC = {
    "kind": "multivariate",
    "order": 2,
    "components": [
        [[[1, 0], "1"], [[0, 2], "1/2"]],
        [[[0, 1], "1"], [[1, 1], "-1"]],
    ],
}


def semantic(spec):
    return (spec.kind, spec.order, spec.method, spec.mode, spec.coeffs, spec.components, spec.powers, spec.shift)


def test_parse_t3():
    spec = parse_problem(json.dumps(T3_DOC))
    assert spec.kind == "univariate"
    assert spec.coeffs == [0, -3, 0, 4]
    assert spec.order == 7
    assert spec.method == "operator"


def test_parse_identity():
    spec = parse_problem({"kind": "univariate", "coeffs": [[1, "1"]], "order": 3})
    assert spec.coeffs == [0, 1]


def test_parse_quad_pair():
    spec = parse_problem(QUAD_DOC)
    system = spec.system()
    assert system.nvars == 2
    assert system.components[0].terms == {(1, 0): 1, (0, 2): F(1, 2)}
    assert system.components[1].terms == {(0, 1): 1, (1, 1): -1}


@pytest.mark.parametrize("doc", [
    "not json",
    {"kind": "bivariate", "coeffs": [[1, "1"]], "order": 3},
    {"kind": "univariate", "coeffs": [[1, "1"]], "order": 0},
    {"kind": "univariate", "coeffs": [[1, "x"]], "order": 3},
    {"kind": "univariate", "coeffs": [[1, 0.5]], "order": 3},
    {"kind": "univariate", "coeffs": [[1, "1"]], "order": 3, "method": "newton"},
    {"kind": "univariate", "coeffs": [[1, "1"]], "order": 3, "powers": [4]},
    {"kind": "multivariate", "components": [[[[1], "1"]], [[[0, 1], "1"]]], "order": 2},
])
def test_schema_errors(doc):
    with pytest.raises(SchemaError):
        parse_problem(doc if isinstance(doc, str) else json.dumps(doc))


@pytest.mark.parametrize("doc, fragment", [
    ({"kind": "univariate", "coeffs": [[0, "1"], [1, "1"]], "order": 3}, "shift"),
    ({"kind": "univariate", "coeffs": [[2, "1"]], "order": 3}, "V'(0) = 0"),
    ({"kind": "univariate", "coeffs": [[2, "1"]], "order": 3, "shift": {"z0": "1", "v0": "2"}}, "does not equal"),
    ({"kind": "multivariate", "order": 2, "components": [[[[1, 0], "1"], [[0, 1], "1"]], [[[1, 0], "2"], [[0, 1], "2"]]]},
     "singular"),
])
def test_validation_errors(doc, fragment):
    with pytest.raises(ValidationError, match=re.escape(fragment)):
        parse_problem(doc)


def test_float_tokens():
    assert parse_value("sqrt2", "float") == pytest.approx(math.sqrt(2))
    assert parse_value("-cos(pi/4)", "float") == pytest.approx(-math.sqrt(0.5))
    assert parse_value("sqrt2/2", "float") == pytest.approx(math.sqrt(0.5))
    assert parse_value("3*pi", "float") == pytest.approx(3 * math.pi)
    assert parse_value("1/3", "float") == pytest.approx(1 / 3)
    with pytest.raises(SchemaError):
        parse_value("sqrt2", "rational")
    with pytest.raises(SchemaError):
        parse_value("sqrt3", "float")


def test_run_all_t3():
    doc = run(parse_problem(T3_DOC, method="all"))
    assert set(doc["method_results"]) == {"operator", "pwq", "matrix-op", "lagrange"}
    for r in doc["method_results"].values():
        assert [F(c) for c in r["U"]] == T3_U7
        assert r["residual"] == "0"
        assert r["ns"] >= 0
    assert doc["discrepancy"] == "0"


def test_run_identity():
    doc = run(parse_problem({"kind": "univariate", "coeffs": [[1, "1"]], "order": 3}))
    assert doc["method_results"]["operator"]["U"] == ["0", "1", "0", "0"]
    assert "discrepancy" not in doc


def test_run_quad_pair():
    doc = run(parse_problem(QUAD_DOC, method="all"))
    for r in doc["method_results"].values():
        assert r["U"][0] == {"1,0": "1", "0,2": "-1/2"}
        assert r["U"][1] == {"0,1": "1", "1,1": "1"}
    assert doc["discrepancy"] == "0"


def test_run_powers():
    doc = run(parse_problem(dict(T3_DOC, powers=[2]), method="lagrange"))
    assert doc["method_results"]["lagrange"]["powers"]["2"][:5] == ["0", "0", "1/9", "0", "8/243"]


def test_run_shift():
    doc = run(parse_problem(json.loads((PROBLEMS / "sqrt_shift.json").read_text())))
    for r in doc["method_results"].values():
        assert r["U"] == ["1", "1/2", "-1/8", "1/16"]
        assert r["center"] == {"z0": "1", "v0": "1"}
    assert doc["discrepancy"] == "0"


def test_run_float_cubic():
    doc = run(parse_problem(json.loads((PROBLEMS / "cubic_period8.json").read_text()), method="all"))
    r2 = math.sqrt(2)
    expected = [0, 1, r2 / 2, 2 / 3, 5 * r2 / 12, 1 / 3, -7 * r2 / 36]
    for r in doc["method_results"].values():
        assert r["U"] == pytest.approx(expected, abs=1e-10)
        assert r["residual"] <= 1e-10
    assert doc["discrepancy"] <= 1e-10


@settings(max_examples=25, deadline=None)
@given(normalized_polys(), st.integers(1, 8), st.sampled_from(["operator", "pwq", "all"]))
def test_roundtrip(V, order, method):
    doc = {"kind": "univariate", "coeffs": [[j, str(c)] for j, c in enumerate(V)], "order": order, "method": method}
    spec = parse_problem(doc)
    again = parse_problem(json.dumps(emit_problem(spec)))
    assert semantic(again) == semantic(spec)


def test_roundtrip_multivariate_with_shift():
    doc = dict(QUAD_DOC, shift={"z0": ["1/2", "0"], "v0": ["1/2", "0"]}, powers=[1])
    spec = parse_problem(doc)
    assert semantic(parse_problem(emit_problem(spec))) == semantic(spec)


def test_rational_output_reparses_exactly():
    doc = run(parse_problem(T3_DOC, order=15))
    U = [F(c) for c in doc["method_results"]["operator"]["U"]]
    from dvfinv.oracles import t3_inverse_closed_form

    assert U == list(t3_inverse_closed_form(15).coeffs)


# main / exit codes ------------------------------------------------------------------


def write(tmp_path, doc, name="p.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def test_main_invert_ok(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["invert", write(tmp_path, T3_DOC), "--method", "all", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["discrepancy"] == "0"


def test_main_order_override(tmp_path, capsys):
    assert main(["invert", write(tmp_path, T3_DOC), "--order", "3"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["method_results"]["operator"]["U"] == ["0", "-1/3", "0", "-4/81"]


def test_main_exit_codes(tmp_path, capsys):
    assert main(["invert", write(tmp_path, "{")]) == EXIT_SCHEMA
    assert main(["invert", str(tmp_path / "missing.json")]) == EXIT_SCHEMA
    bad = {"kind": "univariate", "coeffs": [[0, "1"], [1, "1"]], "order": 3}
    assert main(["invert", write(tmp_path, bad)]) == EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "validation" in err and "shift" in err


def test_main_numeric_failure(tmp_path, capsys, monkeypatch):
    from dvfinv import matrix
    from dvfinv.series import Series1
    from dvfinv.univariate import InversionResult, invert_series

    def broken(V, N, powers=(1,)):
        good = invert_series(V, N)
        U = good.U + Series1.from_poly([0, 0, 1], N)
        return InversionResult(N, {1: U}, "pwq", F(1))

    monkeypatch.setitem(matrix.UNIVARIATE_ROUTES, "pwq", broken)
    assert main(["invert", write(tmp_path, T3_DOC), "--method", "all"]) == EXIT_NUMERIC


def test_main_kron_cap(tmp_path, capsys):
    path = write(tmp_path, QUAD_DOC)
    assert main(["invert", path, "--method", "matrix-op", "--kron-cap", "4"]) == EXIT_NUMERIC
    assert "cap" in capsys.readouterr().err
    assert main(["invert", path, "--method", "matrix-op", "--kron-cap", "9"]) == EXIT_OK


def test_main_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["invert"])
    assert exc.value.code == 2


def test_main_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", write(tmp_path, T3_DOC), "--orders", "8,16,32", "--csv", str(out)]) == EXIT_OK
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["method", "order", "nanoseconds"]
    body = rows[1:]
    assert len(body) == 12
    for method in ("operator", "pwq", "matrix-op", "lagrange"):
        assert [r[1] for r in body if r[0] == method] == ["8", "16", "32"]
    assert all(int(r[2]) >= 0 for r in body)


def test_main_bench_multivariate(tmp_path, capsys):
    assert main(["bench", write(tmp_path, QUAD_DOC), "--orders", "2,3"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "method,order,nanoseconds"
    assert len(lines) == 5
