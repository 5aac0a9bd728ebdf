"""Continued fractions of Laurent series in 1/z.

The truncated series f_N is the rational function F(z) / z^M, so the
floor/reciprocal iteration f_{n+1} = 1/(f_n - floor(f_n)) on it is the
Euclidean algorithm on (F, z^M).  Remainders are carried as primitive
integer polynomials together with one rational scale factor, which keeps
coefficient growth at the subresultant level.

Only quotients that cannot depend on the unknown tail are certified: the
k-th convergent (and the next denominator degree) is kept when
d_k + d_{k+1} <= precision - 2, one coefficient stricter than needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .algebra import MINUS_INFINITY, ONE, ZERO, Polynomial, _divrem_int, _primitive
from .errors import InsufficientExpansion, PrecisionBudgetExceeded, SeriesAppearsRational
from .series import LaurentSeries

DEFAULT_BUDGET = 40000


@dataclass(frozen=True)
class Convergent:
    k: Optional[int]
    p: Polynomial
    q: Polynomial

    @property
    def d_k(self) -> int:
        return self.q.deg


class CFExpansion:
    """Certified prefix of the continued fraction of a series.

    ``degrees`` holds d_0, ..., d_c where c = certified_count; the last entry
    is the (certified) degree of the first uncertified convergent.
    """

    def __init__(self, quotients, degrees, certified_count, precision, terminated=False):
        self.quotients = tuple(quotients)
        self.degrees = tuple(degrees)
        self.certified_count = certified_count
        self.precision = precision
        self.terminated = terminated
        self._conv: List[Convergent] = []

    def convergent(self, k: int) -> Convergent:
        if k >= len(self.quotients):
            raise InsufficientExpansion(f"convergent {k} is not certified")
        conv = self._conv
        while len(conv) <= k:
            n = len(conv)
            a = self.quotients[n]
            if n == 0:
                conv.append(Convergent(0, a, ONE))
            elif n == 1:
                conv.append(Convergent(1, a * conv[0].p + ONE, a))
            else:
                conv.append(Convergent(n, a * conv[n - 1].p + conv[n - 2].p, a * conv[n - 1].q + conv[n - 2].q))
        return conv[k]

    @property
    def convergents(self) -> List[Convergent]:
        if self.quotients:
            self.convergent(len(self.quotients) - 1)
        return list(self._conv)

    def convergent_of_degree(self, u: int) -> Convergent:
        try:
            k = self.degrees.index(u)
        except ValueError:
            raise InsufficientExpansion(f"no certified convergent of degree {u}") from None
        return self.convergent(k)

    @property
    def last_certified_degree(self):
        return self.degrees[self.certified_count - 1] if self.certified_count else MINUS_INFINITY


def _euclid(series: LaurentSeries):
    """Certified quotients of the truncation of `series`.

    Returns (quotients, degrees, certified_count, terminated, apparent_rational).
    """
    N, K = series.known_count, series.K
    prec = series.precision
    M = N - 1 - K
    F = series.window_polynomial()
    scale, Fint = F.primitive()
    num = list(Fint.integer_parts()[0])
    if M >= 0:
        den = [0] * M + [1]
        lam = scale  # f = lam * num / den
    else:
        # the prefix is a polynomial; write it as (F * z^-M) / 1
        num = [0] * (-M) + num
        den = [1]
        lam = scale
    quotients = []
    degrees = [0]
    terminated = False
    apparent_rational = False
    while True:
        k = len(quotients)
        d_k = degrees[-1]
        if len(num) < len(den):
            a = ZERO
            r = num
            s = 1
        else:
            qi, r, s = _divrem_int(num, den)
            a = Polynomial.from_integer_parts(qi) * (lam / s)
        if k >= 1 and a.deg < 1:
            raise AssertionError("partial quotient of degree < 1")
        if not r:
            # the truncation is exactly p_k/q_k
            if prec == math.inf:
                quotients.append(a)
                terminated = True
            else:
                apparent_rational = True
            break
        # next denominator degree
        d_next = d_k + (len(den) - len(r))
        if d_k + d_next > prec - 2:
            if d_k + d_next >= prec:
                apparent_rational = True
            break
        quotients.append(a)
        degrees.append(d_next)
        g = _primitive(r)
        c = Fraction(r[-1], g[-1])
        # f_{k+1} = 1 / (lam * r / (s * den)) = (s / (lam * c)) * den / g
        lam = Fraction(s) / (lam * c)
        num, den = den, g
    return quotients, degrees, len(quotients), terminated, apparent_rational


def cf_expand(series: LaurentSeries, target_denominator_degree: int, budget: int = DEFAULT_BUDGET) -> CFExpansion:
    """Expand until a certified convergent of degree >= target exists."""
    target = target_denominator_degree
    if series.exact:
        q, degs, c, term, _ = _euclid(series)
        return CFExpansion(q, degs, c, series.precision, terminated=term)
    n = 2 * max(target, 1) + series.K + 8
    while True:
        if series.known_count < n:
            series.extend(n)
        # only the first n coefficients: a long cached prefix would slow Euclid down
        work = series if series.known_count == n else series.prefix(n)
        q, degs, c, term, apparent = _euclid(work)
        if c and degs[c - 1] >= target:
            return CFExpansion(q, degs, c, work.precision, terminated=term)
        if n >= budget:
            if apparent:
                raise SeriesAppearsRational()
            raise PrecisionBudgetExceeded(
                f"no certified convergent of degree {target} within {budget} coefficients")
        n = min(2 * n, budget)


PRIMES = (2305843009213693951, 4611686018427387847, 9223372036854775783)


def _degrees_mod_p(series: LaurentSeries, prime: int):
    """Certified denominator degrees from the Euclidean algorithm over F_p.

    Returns (degrees, exhausted), or None when the prime divides a
    denominator or the leading coefficient.  `exhausted` means the remainder
    vanished mod p: the known prefix agrees with a rational function.  A degree found here is a degree over Q as well: it marks a
    Hankel minor that is nonzero mod p, hence nonzero.
    """
    N, K = series.known_count, series.K
    prec = series.precision
    M = N - 1 - K
    num = []
    for x in reversed(series.coeffs):
        if x.denominator % prime == 0:
            return None
        num.append(x.numerator * pow(x.denominator, -1, prime) % prime)
    if num[-1] == 0:
        return None
    if M >= 0:
        den = [0] * M + [1]
    else:
        num = [0] * (-M) + num
        den = [1]
    degrees = [0]
    exhausted = False
    while True:
        # num mod den over F_p
        inv = pow(den[-1], -1, prime)
        r = list(num)
        dl = len(den) - 1
        for i in range(len(r) - 1, dl - 1, -1):
            c = r[i] * inv % prime
            if c:
                off = i - dl
                for j in range(dl):
                    if den[j]:
                        r[off + j] = (r[off + j] - c * den[j]) % prime
            r[i] = 0
        r = r[:dl]
        while r and r[-1] == 0:
            r.pop()
        if not r:
            exhausted = True
            break
        d_k = degrees[-1]
        d_next = d_k + (len(den) - len(r))
        if d_k + d_next > prec - 2:
            break
        degrees.append(d_next)
        num, den = den, r
    return degrees, exhausted


def certified_degrees(series: LaurentSeries, target: int, budget: int = DEFAULT_BUDGET, primes=PRIMES):
    """Degrees of Phi(f) certified through `target`, found modulo a prime.

    Every returned degree belongs to Phi(f).  When consecutive returned
    degrees differ by one, no element of Phi lies between them either, so a
    run of size-one steps is an exact statement about the gaps of f.  A
    larger step is only an upper bound for the true gap; callers confirm such
    gaps with the exact expansion.
    """
    n = 2 * max(target, 1) + series.K + 8
    previous = None
    while True:
        if series.exact:
            work = series
        else:
            if series.known_count < n:
                series.extend(n)
            work = series if series.known_count == n else series.prefix(n)
        for prime in primes:
            found = _degrees_mod_p(work, prime)
            if found is not None:
                break
        else:
            raise PrecisionBudgetExceeded("no usable prime for the modular degree scan")
        degs, exhausted = found
        if len(degs) >= 2 and degs[-2] >= target:
            return degs
        if series.exact:
            return degs
        if exhausted and previous == degs[-1]:
            # same terminal degree after doubling the prefix
            raise SeriesAppearsRational()
        previous = degs[-1] if exhausted else None
        if n >= budget:
            raise PrecisionBudgetExceeded(f"degree scan did not reach {target} within {budget} coefficients")
        n = min(2 * n, budget)


def _residual_window(p: Polynomial, q: Polynomial, series: LaurentSeries):
    """Coefficients of q f - p at the positions the known prefix determines.

    Returns (top, coeffs, lowest) where coeffs[i] is the coefficient of
    z^(top - i) and lowest is the lowest determined exponent.
    """
    N, K = series.known_count, series.K
    low = K - N + 1
    F = series.window_polynomial()
    shift_p = -low
    prod = q * F
    if shift_p >= 0:
        res = prod - p.shift(shift_p)
        base = low
    else:
        res = prod.shift(-shift_p) - p
        base = 0
    if series.exact:
        lowest = base
    else:
        lowest = q.deg - series.precision + 1
    top = max(q.deg + K, p.deg if p else MINUS_INFINITY)
    return res, base, top, lowest


def error_degree(c, series: LaurentSeries, budget: int = DEFAULT_BUDGET):
    """deg(q f - p), extending the series until it is resolved."""
    p, q = c.p, c.q
    while True:
        res, base, top, lowest = _residual_window(p, q, series)
        for e in range(int(top), int(lowest) - 1, -1):
            if res[e - base] != 0:
                return e
        if series.exact:
            return MINUS_INFINITY
        if series.known_count >= budget:
            raise PrecisionBudgetExceeded("no nonzero coefficient of q f - p within the budget")
        series.extend(min(2 * series.known_count, budget))


def convergent_check(p: Polynomial, q: Polynomial, series: LaurentSeries, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff deg(q f - p) < -deg q."""
    if not q:
        raise ValueError("denominator must be nonzero")
    dq = q.deg
    need = 2 * dq + series.K + 2
    if series.known_count < need:
        series.extend(need)
    while True:
        res, base, top, lowest = _residual_window(p, q, series)
        for e in range(int(top), max(int(lowest), -dq) - 1, -1):
            if res[e - base] != 0:
                return False
        if lowest <= -dq:
            return True
        if series.known_count >= budget:
            raise PrecisionBudgetExceeded("cannot decide convergent property within the budget")
        series.extend(min(2 * series.known_count, budget))
