import csv
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import poly
from mahlermu.cfrac import Convergent, cf_expand
from mahlermu.numeric import (
    CSV_COLUMNS,
    approx_values,
    approx_values_recursive,
    build_approx,
    empirical_exponent,
    eval_f,
    records_to_rows,
    write_csv,
)
from mahlermu.series import LaurentSeries


@pytest.fixture(scope="module")
def worked_eval(worked_series):
    eq, s = worked_series[(1, 1, 1)]
    return eq, s, eval_f(s, 2, 5000)


def test_partial_sums_and_stability(worked_series):
    eq, s = worked_series[(1, 1, 1)]
    head = LaurentSeries.finite(0, s.coeffs[:4])
    ev = eval_f(head, 2, 60)
    assert not ev.heuristic
    with mpmath.workdps(80):
        assert ev.value == mpmath.mpf(11) / 8
        a = eval_f(s, 2, 100).value
        b = eval_f(s, 2, 200).value
        assert abs(a - b) < mpmath.mpf(10) ** -95


def test_exact_prefix_at_ten(worked_series):
    _, s = worked_series[(2, 1, -3)]
    fin = LaurentSeries.finite(0, s.coeffs[:10])
    expect = sum(Fraction(c) / Fraction(10) ** j for j, c in enumerate(s.coeffs[:10]))
    with mpmath.workdps(60):
        got = eval_f(fin, 10, 40).value
        assert abs(got - mpmath.mpf(expect.numerator) / expect.denominator) < mpmath.mpf(10) ** -45


def test_eval_rejects_small_b(worked_series):
    _, s = worked_series[(1, 1, 1)]
    with pytest.raises(ValueError):
        eval_f(s, 1, 50)


def test_first_iterate_formula(worked_series):
    eq, s = worked_series[(1, 1, 1)]
    c = cf_expand(s, 4).convergent_of_degree(1)
    b, d = Fraction(2), 3
    p1, q1 = approx_values(c.p, c.q, eq, 2, 1)
    assert q1 == c.q(b ** d) * eq.B(b)
    assert p1 == c.p(b ** d) * eq.A(b) + c.q(b ** d) * eq.C(b)


@pytest.mark.parametrize("u", [0, 1, 3])
def test_closed_form_matches_recursion(worked_series, u):
    eq, s = worked_series[(1, 2, 1)]
    c = cf_expand(s, 8).convergent_of_degree(u)
    for m in range(7):
        assert approx_values(c.p, c.q, eq, 2, m) == approx_values_recursive(c.p, c.q, eq, 2, m)


def test_worked_experiment(worked_eval):
    eq, s, fb = worked_eval
    c = cf_expand(s, 8).convergent_of_degree(1)
    recs = [build_approx(c, eq, 2, m, fb) for m in range(1, 7)]
    ratios = [r.ratio for r in recs]
    assert all(a < b < 3 for a, b in zip(ratios, ratios[1:]))
    assert abs(ratios[-1] - 3) < 0.1
    assert empirical_exponent(recs) == ratios[-1]
    assert empirical_exponent(recs) <= 3 + 0.05
    growth = recs[5].log_abs_q / recs[4].log_abs_q
    assert abs(growth - 3) < 0.05
    residuals = [r.log_abs_residual for r in recs]
    assert all(a > b for a, b in zip(residuals, residuals[1:]))
    # denominators of the rational values do not grow with m
    assert len({r.p_val.denominator for r in recs}) == 1
    assert len({r.q_val.denominator for r in recs}) == 1


def test_unit_gap_convergent_near_two(worked_eval):
    eq, s, fb = worked_eval
    c = cf_expand(s, 8).convergent_of_degree(3)  # gap [3, 4]
    recs = [build_approx(c, eq, 2, m, fb) for m in range(1, 6)]
    assert all(2 < r.ratio < 2.2 for r in recs)


def test_single_record_and_empty(worked_eval):
    eq, s, fb = worked_eval
    rec = build_approx(cf_expand(s, 4).convergent(1), eq, 2, 2, fb)
    assert empirical_exponent([rec]) == rec.ratio
    with pytest.raises(ValueError):
        empirical_exponent([])
    with pytest.raises(ValueError):
        build_approx(cf_expand(s, 4).convergent(1), eq, 2, -1, fb)


def test_csv_output(worked_eval, tmp_path):
    eq, s, fb = worked_eval
    c = cf_expand(s, 4).convergent(1)
    recs = [build_approx(c, eq, 2, m, fb) for m in range(1, 4)]
    path = tmp_path / "a.csv"
    write_csv(recs, path)
    rows = list(csv.DictReader(path.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [int(r["m"]) for r in rows] == [1, 2, 3]
    assert rows == [{k: str(v) for k, v in r.items()} for r in records_to_rows(recs)]


@settings(max_examples=60)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.integers(0, 4), st.sampled_from([2, -2, 3, 5]))
def test_closed_form_property(pc, qc, m, b):
    from mahlermu.series import MahlerEquation

    q = poly(*qc)
    if q.is_zero():
        return
    eq = MahlerEquation(poly(1, -1), poly(2, 0, 1), poly(-1, 3), 2)
    conv = Convergent(None, poly(*pc), q)
    assert approx_values(conv.p, conv.q, eq, b, m) == approx_values_recursive(conv.p, conv.q, eq, b, m)
