import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import CORPUS, frac_list, poly, random_series, worked
from mahlermu.algebra import MINUS_INFINITY, Polynomial
from mahlermu.errors import EquationError, FreeParameterError, ParseError
from mahlermu.series import (
    LaurentSeries,
    MahlerEquation,
    dumps_equation,
    expand,
    expand_any,
    infer_degree,
    load_equation,
    loads_equation,
    residual_degree,
)
from oracles import explicit_coefficients

# first 12 coefficients of the worked family, from the explicit recurrence oracle
WORKED_COEFFS = {
    (1, 1, 1): frac_list([1, 1, -1, 1, 0, 0, 0, -1, 1, -1, 2, -2]),
    (2, 1, -3): frac_list([1, -2, 2, -2, -2, 2, -2, 6, -6, 6, -10, 10]),
    (1, 2, 1): frac_list([2, 1, -1, 1, 0, 0, 0, -1, 1, -1, 2, -2]),
}


def test_equation_normalisation():
    eq = MahlerEquation(poly(Fraction(1, 2)), poly(1, 1), poly(Fraction(3, 2), 3), 2)
    assert eq.A == poly(1) and eq.B == poly(2, 2) and eq.C == poly(3, 6)
    assert (eq.r_a, eq.r_b, eq.r_c) == (0, 1, 1)
    assert eq.alpha == 1 and eq.beta == 2
    # sign fixed by B's leading coefficient
    neg = MahlerEquation(poly(1), poly(0, -1), poly(1), 2)
    assert neg.B == poly(0, 1) and neg.A == poly(-1)


def test_equation_rejects_bad_data():
    with pytest.raises(EquationError):
        MahlerEquation(poly(1), poly(0, 1), poly(1), 1)
    with pytest.raises(EquationError):
        MahlerEquation(Polynomial([]), poly(0, 1), poly(1), 2)
    with pytest.raises(EquationError):
        MahlerEquation(poly(1), poly(0, 1), Polynomial([]), 2)
    MahlerEquation(poly(1), poly(0, 1), Polynomial([]), 2, homogeneous=True)


@pytest.mark.parametrize("eq, expect", [
    (worked(1, 1, 1), [0]),
    (MahlerEquation(poly(1), poly(0, 1), poly(1), 2), [1, -1]),
    (MahlerEquation(poly(0, 1), poly(0, 1), poly(0, 1), 2), [0]),
])
def test_infer_degree(eq, expect):
    assert infer_degree(eq) == expect


@pytest.mark.parametrize("triple", list(WORKED_COEFFS))
def test_worked_coefficients(triple):
    s = expand(worked(*triple), 0, 12)
    assert list(s.coeffs) == WORKED_COEFFS[triple]


def test_worked_head_condition():
    # f_1 = (a0 - 1) f_0 + c0 with f_0 = c1; irrational exactly when it is nonzero
    for a0, c1, c0 in [(1, 1, 1), (2, 1, -3), (1, 2, 1), (3, 1, -2), (2, 2, -2)]:
        s = expand(worked(a0, c1, c0), 0, 4)
        assert s.coeffs[0] == c1
        assert s.coeffs[1] == (a0 - 1) * c1 + c0


def test_nonunit_linear_coefficient():
    # A = a1 z + a0 with a1 != 1 fixes f_0 from (1 - a1) f_0 = c1
    eq = MahlerEquation(poly(1, 3), poly(1, 1), poly(1, 4), 3)
    s = expand(eq, 0, 6)
    assert s.coeffs[0] == Fraction(4, -2)


def test_homogeneous_needs_seed():
    eq = MahlerEquation(poly(2, 1), poly(1, 1), Polynomial([]), 3, homogeneous=True)
    with pytest.raises(FreeParameterError) as info:
        expand(eq, 0, 8)
    assert info.value.positions == [0]
    s = expand(eq, 0, 8, {0: Fraction(1)})
    assert s.coeffs[0] == 1
    assert residual_degree(eq, s) == MINUS_INFINITY


def test_extend_is_monotone(worked_series):
    _, s = worked_series[(1, 1, 1)]
    t = s.prefix(10)
    before = t.coeffs
    t.extend(40)
    assert t.coeffs[:10] == before
    again = t.coeffs
    t.extend(5)
    assert t.coeffs == again
    t.extend(t.known_count)
    assert t.coeffs == again
    assert list(expand(worked(1, 1, 1), 0, 40).coeffs) == list(t.coeffs[:40])


def test_residual_degree_detects_corruption(worked_series):
    eq, s = worked_series[(1, 1, 1)]
    s = s.prefix(40)
    assert residual_degree(eq, s) == MINUS_INFINITY
    assert residual_degree(eq, s.prefix(10)) == MINUS_INFINITY
    coeffs = list(s.coeffs)
    coeffs[20] += 1
    bad = LaurentSeries(s.K, coeffs)
    deg = residual_degree(eq, bad)
    # B f has leading z^1, so a change at z^-20 first shows at z^(1 - 20)
    assert deg != MINUS_INFINITY and deg >= 1 - 20


def test_parse_errors():
    with pytest.raises(ParseError, match="line 1"):
        loads_equation('{"d": 2,')
    with pytest.raises(ParseError, match=r"A\[0\]"):
        loads_equation('{"d": 2, "A": ["1/0"], "B": ["1"], "C": ["1"]}')
    with pytest.raises(ParseError, match="'d'"):
        loads_equation('{"d": "2", "A": ["1"], "B": ["1"], "C": ["1"]}')
    with pytest.raises(ParseError, match="'C'"):
        loads_equation('{"d": 2, "A": ["1"], "B": ["1"]}')


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.json")), ids=lambda p: p.stem)
def test_file_round_trip(path):
    ef = load_equation(path)
    again = loads_equation(dumps_equation(ef))
    assert again == ef
    assert json.loads(dumps_equation(again)) == json.loads(dumps_equation(ef))


def test_random_expansions_match_recurrence():
    rng = random.Random(11)
    checked = 0
    for eq, s in random_series(rng, 60, 48):
        assert residual_degree(eq, s) == MINUS_INFINITY
        oracle = explicit_coefficients(list(eq.A.coeffs), list(eq.B.coeffs), list(eq.C.coeffs), eq.d, s.K, 48)
        if oracle is not None:
            checked += 1
            assert oracle == list(s.coeffs[:48])
    assert checked >= 30


@given(st.integers(0, 10_000))
def test_expansion_is_deterministic(seed):
    rng = random.Random(seed)
    (eq, s), = random_series(rng, 1, 24)
    t = expand_any(eq, 24)
    assert t.K == s.K and t.coeffs == s.coeffs
    assert s.coeffs[0] != 0
