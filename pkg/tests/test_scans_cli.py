import json
import math

import pytest

from divisor_moments import cli
from divisor_moments.arith import DivisorPair
from divisor_moments.errors import InvalidPairError
from divisor_moments.report import Table, format_real, parse_csv, render, to_csv, to_json
from divisor_moments.scans import (
    GridSpec,
    ScanRow,
    check_target,
    decade_grid,
    drift_ratio,
    linear_grid,
    ordered_map,
    run_scan,
)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------------ grids


def test_decade_grid_keeps_exact_powers():
    g = decade_grid(1e3, 1e6)
    assert g[0] == 1000.0 and g[-1] == 1e6
    assert len(g) == 28
    assert 1e4 in g and 1e5 in g
    assert all(b > a for a, b in zip(g, g[1:]))
    assert decade_grid(5.0, 1.0) == []


def test_linear_grid_and_parse():
    assert linear_grid(1.0, 3.0, 3) == [1.0, 2.0, 3.0]
    assert linear_grid(1.0, 3.0, 1) == [3.0]
    assert GridSpec.parse("linear:4").points(0.0, 3.0) == [0.0, 1.0, 2.0, 3.0]
    assert GridSpec.parse("10, 20.5").points(1, 2) == [10.0, 20.5]
    assert GridSpec.parse("").points(1, 1e6) == []
    assert str(GridSpec.parse("decade")) == "decade"
    for bad in ("decadent", "1,x", "1,inf", "linear:-2"):
        with pytest.raises(ValueError):
            GridSpec.parse(bad)


def test_ordered_map_preserves_order():
    items = list(range(50))
    assert ordered_map(lambda v: v * v, items, jobs=4) == [v * v for v in items]


def test_drift_ratio():
    rows = [ScanRow(x, 0, 0, 0, v) for x, v in ((1e3, 0.1), (5e3, -0.2), (1e4, 0.3), (1e5, -0.1))]
    overall, first, ratio = drift_ratio(rows, (1e3, 1e4))
    assert (overall, first) == (0.3, 0.2)
    assert ratio == pytest.approx(1.5)


def test_target_pair_rules():
    check_target("voronoi", DivisorPair(1, 1))
    with pytest.raises(InvalidPairError):
        check_target("theorem1", DivisorPair(1, 1))
    with pytest.raises(InvalidPairError):
        check_target("theorem2", DivisorPair(1, 2))
    with pytest.raises(ValueError):
        check_target("nonsense", DivisorPair(1, 2))


def test_scan_rows_against_direct_evaluation(ctx, p12):
    from divisor_moments.moments import theorem1_report
    from divisor_moments.series import auto_truncation

    xs = [1000.0, 2500.5]
    res = run_scan(ctx, "theorem1", p12, xs)
    for x, row in zip(xs, res.rows):
        rep = theorem1_report(ctx, p12, x, auto_truncation(ctx, p12, x))
        assert row.residual == rep.residual
        assert row.normalized == rep.normalized_residual
    assert res.meta["normalization"] == "x^0.5"


# ------------------------------------------------------------------ formatting


def test_format_real_is_round_trip_exact():
    for v in (0.1, 1 / 3, 1e300, -2.5e-310, math.pi):
        assert float(format_real(v)) == v
    assert format_real(-0.0) == "0"
    assert format_real(float("nan")) == "nan"


def test_csv_and_json_carry_the_same_values():
    t = Table(["n", "v"], [[1, 0.1], [2**70, -1 / 3]], {"pair": "1,2", "tol": 1e-8})
    back = parse_csv(to_csv(t))
    assert back.meta == {"pair": "1,2", "tol": "1e-08"}
    assert back.columns == ["n", "v"]
    doc = json.loads(to_json(t))
    assert doc["meta"]["tol"] == 1e-8
    for crow, jrow in zip(back.rows, doc["rows"]):
        assert int(crow[0]) == jrow[0]
        assert float(crow[1]) == jrow[1]
    assert doc["rows"][1][0] == 2**70
    with pytest.raises(ValueError):
        render(t, "xml")


# ------------------------------------------------------------------ CLI


def test_tabulate_dcount(capsys):
    code, out, _ = run_cli(capsys, "tabulate", "dcount", "--pair", "1,2", "--xmax", "10")
    assert code == cli.EXIT_OK
    t = parse_csv(out)
    assert len(t.rows) == 10
    assert t.rows[-1] == ["10", "1", "13"]
    assert t.rows[3] == ["4", "2", "5"]
    assert t.meta["pair"] == "1,2"


def test_tabulate_constants(ctx, capsys):
    code, out, _ = run_cli(capsys, "tabulate", "constants", "--pair", "1,2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    names = [r[0] for r in doc["rows"]]
    assert names == ["c0", "theta0", "c_ab", "zeta(2/1)", "zeta(1/2)", "zeta(-1)*zeta(-2)"]
    values = dict(doc["rows"])
    assert values["zeta(2/1)"] == ctx.zeta(2.0)
    assert values["c_ab"] == pytest.approx(0.2331883, abs=1e-6)


def test_tabulate_delta_matches_library(ctx, capsys):
    from divisor_moments.error_terms import delta_eval

    code, out, _ = run_cli(capsys, "tabulate", "delta", "--pair", "2,3", "--grid", "10,100.5,1000")
    assert code == 0
    rows = parse_csv(out).rows
    for row in rows:
        d = delta_eval(ctx, DivisorPair(2, 3), float(row[0]))
        assert int(row[1]) == d.count
        assert float(row[3]) == d.delta


def test_empty_grid_gives_header_only(capsys):
    code, out, _ = run_cli(capsys, "scan", "voronoi", "--grid", "", "--pair", "1,2")
    assert code == 0
    t = parse_csv(out)
    assert t.columns == ["x", "lhs", "rhs", "residual", "normalized"]
    assert t.rows == []
    assert t.meta["normalization"] == "x^0.5"


def test_diagonal_target_defaults_to_pair_11(capsys):
    code, out, _ = run_cli(capsys, "scan", "theorem2", "--grid", "1000")
    assert code == 0
    assert parse_csv(out).meta["pair"] == "1,1"


@pytest.mark.parametrize(
    "argv",
    [
        ("scan", "theorem2", "--pair", "1,2", "--grid", "1000"),
        ("scan", "theorem1", "--pair", "1,1", "--grid", "1000"),
        ("tabulate", "dcount", "--xmax", "1"),
        ("scan", "voronoi", "--tol", "-1"),
        ("scan", "voronoi", "--grid", "a,b"),
        ("scan", "voronoi", "--trunc", "0"),
        ("scan", "voronoi", "--jobs", "0"),
        ("tabulate", "constants", "--xmin", "5", "--xmax", "3"),
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert "error" in err


@pytest.mark.parametrize("pair", ["2,4", "3,2", "0,1", "x"])
def test_bad_pair_exits_2(capsys, pair):
    with pytest.raises(SystemExit) as info:
        cli.main(["tabulate", "constants", "--pair", pair])
    assert info.value.code == 2
    capsys.readouterr()


def test_unwritable_output_exit_2(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = run_cli(capsys, "tabulate", "dcount", "--xmax", "5", "--out", str(target))
    assert code == cli.EXIT_USAGE
    assert str(target) in err


def test_verify_breach_exits_1(capsys):
    code, out, err = run_cli(capsys, "verify", "--pair", "1,2", "--xmax", "1e4", "--tol", "1e-30")
    assert code == cli.EXIT_BREACH
    assert "FAIL" in out
    assert "identity breach" in err


def test_verify_single_pair_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--pair", "1,3", "--xmax", "1e4")
    assert code == cli.EXIT_OK
    t = parse_csv(out)
    assert {r[4] for r in t.rows} == {"pass"}
    assert t.meta["seed"] == "20240229"


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_scan_files_are_byte_identical_with_threads(tmp_path, capsys, fmt):
    paths = []
    for jobs in ("1", "4", "4"):
        p = tmp_path / f"scan_{jobs}_{len(paths)}.{fmt}"
        argv = ["scan", "first_moment", "--pair", "1,2", "--xmax", "2e4", "--format", fmt, "--jobs", jobs, "--out", str(p)]
        assert cli.main(argv) == 0
        paths.append(p)
    blobs = [p.read_bytes() for p in paths]
    assert blobs[0] == blobs[1] == blobs[2]
    assert capsys.readouterr().out == ""
