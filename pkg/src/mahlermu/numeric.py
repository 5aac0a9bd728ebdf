"""High-precision values of f(b) and the explicit approximations p_{k,m}/q_{k,m}.

Iterating the equation m times on a convergent p_k/q_k gives

    q_{k,m}(z) = q_k(z^(d^m)) prod_{t<m} B(z^(d^t))
    p_{k,m}(z) = p_k(z^(d^m)) prod_{t<m} A(z^(d^t))
                 + q_k(z^(d^m)) sum_{u<m} prod_{t<u} A(z^(d^t)) C(z^(d^u)) prod_{u<t<m} B(z^(d^t))

whose values at b are rational approximations of f(b).  The ratio
-log|f(b) - p/q| / log|q| bounds mu(f(b)) from below in the limit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional

import mpmath

from .cfrac import Convergent
from .errors import PrecisionBudgetExceeded, ZeroDivisorError
from .series import LaurentSeries, MahlerEquation

EVAL_BUDGET = 400_000
TAIL_WINDOW = 32


@dataclass(frozen=True)
class Evaluation:
    value: mpmath.mpf
    terms: int
    tail_estimate: mpmath.mpf
    digits: int
    heuristic: bool = True


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _partial_sum(coeffs, K: int, b: int, n: int):
    """sum_{j<n} coeffs[j] b^(K-j) by Horner in 1/b."""
    inv = mpmath.mpf(1) / b
    acc = mpmath.mpf(0)
    for c in reversed(coeffs[:n]):
        acc = acc * inv + (_mp(c) if c else 0)
    return acc * mpmath.mpf(b) ** K


def _tail_estimate(coeffs, K: int, b: int):
    """Geometric extrapolation of the tail from the last TAIL_WINDOW terms."""
    n = len(coeffs)
    lb = math.log(abs(b))
    logs = []
    for j in range(max(0, n - TAIL_WINDOW), n):
        c = coeffs[j]
        if c:
            logs.append((j, math.log(abs(c.numerator)) - math.log(c.denominator) - (j - K) * lb))
    if not logs:
        return mpmath.mpf(0)
    if len(logs) == 1:
        return mpmath.exp(logs[0][1])
    half = len(logs) // 2
    first = max(v for _, v in logs[:half])
    second = max(v for _, v in logs[half:])
    span = max(1, logs[half][0] - logs[0][0])
    rate = (second - first) / span  # log of the per-term ratio
    if rate >= 0:
        return mpmath.inf
    ratio = mpmath.exp(rate)
    return mpmath.exp(second) * ratio / (1 - ratio)


def eval_f(series: LaurentSeries, b: int, digits: int, budget: int = EVAL_BUDGET) -> Evaluation:
    """Partial sum of f(b) with a heuristic tail estimate below 10^-digits."""
    if abs(b) < 2:
        raise ValueError("|b| must be >= 2")
    with mpmath.workdps(digits + 20):
        target = mpmath.mpf(10) ** (-digits)
        if series.exact:
            value = _partial_sum(series.coeffs, series.K, b, series.known_count)
            return Evaluation(+value, series.known_count, mpmath.mpf(0), digits, heuristic=False)
        n = int(digits * math.log(10) / math.log(abs(b))) + series.K + 2 * TAIL_WINDOW
        while True:
            if series.known_count < n:
                series.extend(n)
            coeffs = series.coeffs
            tail = _tail_estimate(coeffs[:n], series.K, b)
            if tail < target:
                value = _partial_sum(coeffs, series.K, b, n)
                return Evaluation(+value, n, tail, digits)
            if n >= budget:
                raise PrecisionBudgetExceeded(f"coefficient growth defeats {digits} digits within {budget} terms")
            n = min(2 * n, budget)


@dataclass(frozen=True)
class ApproximationRecord:
    k: Optional[int]
    m: int
    p_val: Fraction
    q_val: Fraction
    log_abs_q: mpmath.mpf
    log_abs_err: mpmath.mpf  # log |f(b) - p/q|
    log_abs_residual: mpmath.mpf  # log |q f(b) - p|

    @property
    def ratio(self):
        return -self.log_abs_err / self.log_abs_q


def approx_values(p, q, eq: MahlerEquation, b: int, m: int):
    """(p_{k,m}(b), q_{k,m}(b)) from the closed forms."""
    d = eq.d
    pts = [Fraction(b) ** (d ** t) for t in range(m + 1)]
    A = [eq.A(x) for x in pts[:m]]
    B = [eq.B(x) for x in pts[:m]]
    C = [eq.C(x) for x in pts[:m]]
    top = pts[m]
    qk, pk = q(top), p(top)
    prodB = math.prod(B, start=Fraction(1))
    prodA = math.prod(A, start=Fraction(1))
    s = Fraction(0)
    for u in range(m):
        s += math.prod(A[:u], start=Fraction(1)) * C[u] * math.prod(B[u + 1:], start=Fraction(1))
    return pk * prodA + qk * s, qk * prodB


def approx_values_recursive(p, q, eq: MahlerEquation, b: int, m: int):
    """Same values through p_{k,j}(x) = A(x) p_{k,j-1}(x^d) + C(x) q_{k,j-1}(x^d)."""
    d = eq.d
    pts = [Fraction(b) ** (d ** t) for t in range(m + 1)]
    P, Q = p(pts[m]), q(pts[m])
    for t in range(m - 1, -1, -1):
        x = pts[t]
        P, Q = eq.A(x) * P + eq.C(x) * Q, eq.B(x) * Q
    return P, Q


def build_approx(c: Convergent, eq: MahlerEquation, b: int, m: int, fb) -> ApproximationRecord:
    """Record for p_{k,m}(b)/q_{k,m}(b); `fb` is f(b) (an Evaluation or mpf)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if isinstance(fb, Evaluation):
        value, dps = fb.value, fb.digits + 20
    else:
        value, dps = fb, mpmath.mp.dps
    p_val, q_val = approx_values(c.p, c.q, eq, b, m)
    if q_val == 0:
        raise ZeroDivisorError("q_{k,m}(b) = 0; b is not admissible")
    with mpmath.workdps(dps):
        log_q = mpmath.log(abs(_mp(q_val)))
        diff = value - _mp(p_val) / _mp(q_val)
        if diff == 0:
            raise PrecisionBudgetExceeded("approximation error below working precision")
        log_err = mpmath.log(abs(diff))
        return ApproximationRecord(c.k, m, p_val, q_val, +log_q, +log_err, log_err + log_q)


def empirical_exponent(records: Iterable[ApproximationRecord]):
    """max over records of -log|f(b) - p/q| / log|q|."""
    recs = list(records)
    if not recs:
        raise ValueError("need at least one record")
    return max(r.ratio for r in recs)


CSV_COLUMNS = ("k", "m", "log10_q", "log10_err", "ratio")


def records_to_rows(records: Iterable[ApproximationRecord]) -> List[dict]:
    ln10 = mpmath.log(10)
    rows = []
    for r in records:
        rows.append({
            "k": r.k,
            "m": r.m,
            "log10_q": mpmath.nstr(r.log_abs_q / ln10, 12),
            "log10_err": mpmath.nstr(r.log_abs_err / ln10, 12),
            "ratio": mpmath.nstr(r.ratio, 12),
        })
    return rows


def write_csv(records: Iterable[ApproximationRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        w.writerows(records_to_rows(records))
