"""Mahler equations and the Laurent-series solutions they define.

An equation ``f(z) = (A(z) f(z^d) + C(z)) / B(z)`` is solved for
``f = sum_{k >= -K} f_k z^{-k}`` by matching coefficients of
``B f - A f(z^d) - C = 0`` from the top power of z downwards.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

from .algebra import MINUS_INFINITY, Polynomial, format_rational, to_rational
from .errors import (
    EquationError,
    FreeParameterError,
    InconsistentSystemError,
    InsufficientExpansion,
    ParseError,
)


@dataclass(frozen=True)
class MahlerEquation:
    """The data (A, B, C, d), scaled jointly to integer coefficients with content 1."""

    A: Polynomial
    B: Polynomial
    C: Polynomial
    d: int
    homogeneous: bool = False

    def __post_init__(self):
        A, B, C = (p if isinstance(p, Polynomial) else Polynomial(p) for p in (self.A, self.B, self.C))
        if not isinstance(self.d, int) or self.d < 2:
            raise EquationError("radix d must be an integer >= 2")
        if not A or not B:
            raise EquationError("A and B must be nonzero")
        if not C and not self.homogeneous:
            raise EquationError("C = 0 requires opting into the homogeneous regime")
        # one common scale for all three so the equation itself is unchanged
        den = 1
        for p in (A, B, C):
            den = math.lcm(den, p.integer_parts()[1])
        parts = [[x * (den // p.integer_parts()[1]) for x in p.integer_parts()[0]] for p in (A, B, C)]
        g = 0
        for nums in parts:
            for x in nums:
                g = math.gcd(g, x)
        if parts[1][-1] < 0:
            g = -g
        A, B, C = (Polynomial.from_integer_parts([x // g for x in nums]) for nums in parts)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def r_a(self) -> int:
        return self.A.deg

    @property
    def r_b(self) -> int:
        return self.B.deg

    @property
    def r_c(self):
        return self.C.deg

    @property
    def alpha(self) -> Fraction:
        return self.A.leading

    @property
    def beta(self) -> Fraction:
        return self.B.leading

    def to_json(self, seeds: Optional[Dict[int, Fraction]] = None, K: Optional[int] = None) -> dict:
        obj = {"d": self.d, "A": self.A.to_text(), "B": self.B.to_text(), "C": self.C.to_text()}
        if self.homogeneous:
            obj["homogeneous"] = True
        if K is not None:
            obj["K"] = K
        if seeds:
            obj["seeds"] = {str(k): format_rational(Fraction(v)) for k, v in sorted(seeds.items())}
        return obj


@dataclass(frozen=True)
class EquationFile:
    equation: MahlerEquation
    seeds: Dict[int, Fraction] = field(default_factory=dict)
    K: Optional[int] = None


def _parse_poly(obj: dict, key: str) -> Polynomial:
    if key not in obj:
        raise ParseError(f"missing field {key!r}")
    items = obj[key]
    if not isinstance(items, list):
        raise ParseError(f"{key}: expected a list of rationals")
    out = []
    for i, item in enumerate(items):
        if isinstance(item, bool) or not isinstance(item, (str, int)):
            raise ParseError(f"{key}[{i}]: expected a rational string, got {item!r}")
        try:
            out.append(to_rational(item))
        except ParseError as exc:
            raise ParseError(f"{key}[{i}]: {exc}") from None
    return Polynomial(out)


def parse_equation(obj) -> EquationFile:
    if not isinstance(obj, dict):
        raise ParseError("equation file must hold a JSON object")
    d = obj.get("d")
    if isinstance(d, bool) or not isinstance(d, int):
        raise ParseError("field 'd' must be an integer")
    A, B, C = (_parse_poly(obj, k) for k in ("A", "B", "C"))
    homogeneous = bool(obj.get("homogeneous", False))
    try:
        eq = MahlerEquation(A, B, C, d, homogeneous=homogeneous)
    except EquationError as exc:
        raise ParseError(str(exc)) from None
    seeds = {}
    raw_seeds = obj.get("seeds", {}) or {}
    if not isinstance(raw_seeds, dict):
        raise ParseError("field 'seeds' must be an object")
    for k, v in raw_seeds.items():
        try:
            seeds[int(k)] = to_rational(v)
        except ValueError:
            raise ParseError(f"seeds[{k!r}]: bad seed") from None
    K = obj.get("K")
    if K is not None and (isinstance(K, bool) or not isinstance(K, int)):
        raise ParseError("field 'K' must be an integer")
    return EquationFile(eq, seeds, K)


def loads_equation(text: str) -> EquationFile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_equation(obj)


def load_equation(path) -> EquationFile:
    with open(path, encoding="utf-8") as fh:
        return loads_equation(fh.read())


def dumps_equation(ef: EquationFile) -> str:
    return json.dumps(ef.equation.to_json(ef.seeds, ef.K), indent=2)


# ---------------------------------------------------------------------------


def infer_degree(eq: MahlerEquation) -> List[int]:
    """Every K with deg B + K = max(r_a + dK, r_c), plus the cancelling case."""
    ra, rb, rc, d = eq.r_a, eq.r_b, eq.r_c, eq.d
    found = set()
    if (rb - ra) % (d - 1) == 0:
        k = (rb - ra) // (d - 1)
        if ra + d * k >= rc:
            found.add(k)
    if rc != MINUS_INFINITY:
        k = rc - rb
        if ra + d * k <= rc:
            found.add(k)
        # leading terms of A f(z^d) and C may cancel, letting B f sit lower
        if (rc - ra) % d == 0:
            k = (rc - ra) // d
            if rb + k < rc:
                found.add(k)
    return sorted(found, reverse=True)


class _CoefficientSolver:
    """Incremental elimination over the coefficient-matching equations.

    Unknown j stands for the coefficient of z^(K-j).  Equations are taken
    from the top power down.  A row is kept under its largest unknown; when
    a row has one unknown left it is solved and substituted everywhere.
    """

    def __init__(self, eq: MahlerEquation, K: int, seeds: Dict[int, Fraction]):
        self.eq = eq
        self.K = K
        self.values: Dict[int, Fraction] = {}
        self.rows: Dict[int, list] = {}
        self.uses = defaultdict(set)
        self.prefix = 0
        self.A = [(i, c) for i, c in enumerate(eq.A.coeffs) if c]
        self.B = [(i, c) for i, c in enumerate(eq.B.coeffs) if c]
        self.C = eq.C.coeffs
        top = max(eq.r_b + K, eq.r_a + eq.d * K)
        if eq.r_c != MINUS_INFINITY:
            top = max(top, eq.r_c)
        self.next_e = top
        self.lookahead = 32 + 4 * (eq.r_a + eq.r_b + eq.d)
        for k, v in sorted(seeds.items()):
            j = k + K
            if j < 0:
                raise EquationError(f"seed position {k} lies above the series degree")
            self._add_row({j: Fraction(1)}, Fraction(v))

    def _equation(self, e: int):
        K, d = self.K, self.eq.d
        terms: Dict[int, Fraction] = {}
        for i, b in self.B:
            j = i + K - e
            if j >= 0:
                terms[j] = terms.get(j, 0) + b
        for i, a in self.A:
            t = i + d * K - e
            if t >= 0 and t % d == 0:
                j = t // d
                terms[j] = terms.get(j, 0) - a
        rhs = self.C[e] if 0 <= e < len(self.C) else Fraction(0)
        return {j: c for j, c in terms.items() if c}, rhs

    def _add_row(self, terms: Dict[int, Fraction], rhs: Fraction) -> None:
        values = self.values
        for j in [j for j in terms if j in values]:
            rhs -= terms.pop(j) * values[j]
        while terms:
            piv = max(terms)
            row = self.rows.get(piv)
            if row is None:
                break
            rterms, rrhs = row
            factor = terms[piv] / rterms[piv]
            for j, c in rterms.items():
                v = terms.get(j, 0) - factor * c
                if v:
                    terms[j] = v
                else:
                    terms.pop(j, None)
            rhs -= factor * rrhs
        if not terms:
            if rhs != 0:
                raise InconsistentSystemError()
            return
        self.rows[piv] = [terms, rhs]
        for j in terms:
            self.uses[j].add(piv)
        if len(terms) == 1:
            self._cascade(piv)

    def _cascade(self, piv: int) -> None:
        stack = [piv]
        while stack:
            p = stack.pop()
            row = self.rows.pop(p, None)
            if row is None:
                continue
            terms, rhs = row
            val = rhs / terms[p]
            self.values[p] = val
            for q in self.uses.pop(p, ()):
                if q == p or q not in self.rows:
                    continue
                qrow = self.rows[q]
                c = qrow[0].pop(p)
                qrow[1] -= c * val
                if len(qrow[0]) == 1:
                    stack.append(q)

    def solve_through(self, n: int) -> List[Fraction]:
        eq = self.eq
        while True:
            while self.prefix in self.values:
                self.prefix += 1
            if self.prefix >= n:
                break
            m = eq.r_b + self.K - self.next_e
            if m > n - 1 + self.lookahead:
                free = [j - self.K for j in range(n) if j not in self.values and j not in self.rows]
                raise FreeParameterError(free)
            terms, rhs = self._equation(self.next_e)
            self.next_e -= 1
            self._add_row(terms, rhs)
        if self.values[0] == 0:
            raise InconsistentSystemError(f"inconsistent: no series of exact degree {self.K}")
        return [self.values[j] for j in range(n)]


class LaurentSeries:
    """Known prefix f_{-K}, f_{-K+1}, ... of a Laurent series in 1/z.

    ``coeffs[j]`` is the coefficient of z^(K-j).  A series built from an
    equation can be extended on demand; a series flagged ``exact`` is a
    finite sum whose unlisted coefficients are all zero.
    """

    def __init__(self, K: int, coeffs: Iterable, source: Optional[MahlerEquation] = None,
                 seeds: Optional[Dict[int, Fraction]] = None, exact: bool = False):
        self.K = K
        self._coeffs = [to_rational(c) for c in coeffs]
        self.source = source
        self.seeds = dict(seeds or {})
        self.exact = exact
        self._solver: Optional[_CoefficientSolver] = None
        if self._coeffs and self._coeffs[0] == 0:
            raise EquationError("leading coefficient of a Laurent series must be nonzero")

    @classmethod
    def finite(cls, K: int, coeffs: Iterable) -> "LaurentSeries":
        return cls(K, coeffs, exact=True)

    @property
    def coeffs(self) -> tuple:
        return tuple(self._coeffs)

    @property
    def known_count(self) -> int:
        return len(self._coeffs)

    @property
    def precision(self):
        """f minus its known prefix has degree at most -precision."""
        if self.exact:
            return math.inf
        return len(self._coeffs) - self.K

    @property
    def extendable(self) -> bool:
        return self.source is not None or self.exact

    def coefficient(self, k: int) -> Fraction:
        """f_k, the coefficient of z^(-k)."""
        j = k + self.K
        if j < 0:
            return Fraction(0)
        if j >= len(self._coeffs):
            if self.exact:
                return Fraction(0)
            self.extend(j + 1)
        return self._coeffs[j]

    def extend(self, n: int) -> "LaurentSeries":
        if n <= len(self._coeffs):
            return self
        if self.exact:
            return self
        if self.source is None:
            raise InsufficientExpansion(f"series has no source equation; cannot extend past {len(self._coeffs)}")
        target = max(n, 2 * len(self._coeffs))
        if self._solver is None:
            self._solver = _CoefficientSolver(self.source, self.K, self.seeds)
        new = self._solver.solve_through(target)
        assert new[:len(self._coeffs)] == self._coeffs
        self._coeffs = new
        return self

    def prefix(self, n: int) -> "LaurentSeries":
        """Independent copy holding the first n known coefficients."""
        if n > len(self._coeffs):
            self.extend(n)
        return LaurentSeries(self.K, self._coeffs[:n], self.source, self.seeds, exact=False)

    def window_polynomial(self, n: Optional[int] = None) -> Polynomial:
        """F with f_prefix = F(z) * z^(K - n + 1), F = sum x_j z^(n-1-j)."""
        n = len(self._coeffs) if n is None else n
        return Polynomial(reversed(self._coeffs[:n]))

    def times_polynomial(self, P: Polynomial) -> "LaurentSeries":
        """Known prefix of P*f (same number of coefficients)."""
        top = P.coeffs[::-1]
        out = []
        for j in range(len(self._coeffs)):
            acc = Fraction(0)
            for i in range(min(j, len(top) - 1) + 1):
                acc += top[i] * self._coeffs[j - i]
            out.append(acc)
        return LaurentSeries(self.K + P.deg, out, exact=self.exact)

    def __repr__(self):
        shown = ", ".join(format_rational(c) for c in self._coeffs[:8])
        more = ", ..." if len(self._coeffs) > 8 else ""
        return f"LaurentSeries(K={self.K}, [{shown}{more}])"


def expand(eq: MahlerEquation, K: int, n: int, seeds: Optional[Dict[int, Fraction]] = None) -> LaurentSeries:
    if n < 1:
        raise ValueError("n must be positive")
    series = LaurentSeries(K, [], source=eq, seeds=seeds)
    series._solver = _CoefficientSolver(eq, K, series.seeds)
    series._coeffs = series._solver.solve_through(n)
    return series


def extend(series: LaurentSeries, n: int) -> LaurentSeries:
    return series.extend(n)


def expand_any(eq: MahlerEquation, n: int, seeds: Optional[Dict[int, Fraction]] = None,
               K: Optional[int] = None) -> LaurentSeries:
    """Expand with the given K, or with the largest balancing K that works."""
    candidates = [K] if K is not None else infer_degree(eq)
    if not candidates:
        raise InconsistentSystemError("inconsistent: no Laurent-series degree balances the equation")
    last = None
    for k in candidates:
        try:
            return expand(eq, k, n, seeds)
        except (InconsistentSystemError, FreeParameterError, EquationError) as exc:
            last = exc
    raise last


def residual_degree(eq: MahlerEquation, series: LaurentSeries):
    """Degree of B f - A f(z^d) - C over the positions the known prefix determines."""
    N, K, d = series.known_count, series.K, eq.d
    if N == 0:
        return MINUS_INFINITY
    low = K - N + 1  # exponent of the last known term
    F = series.window_polynomial()
    top = max(eq.r_b + K, eq.r_a + d * K)
    if eq.r_c != MINUS_INFINITY:
        top = max(top, eq.r_c)
    if series.exact:
        e_min = min(eq.B.valuation() + low, eq.A.valuation() + d * low, 0)
    else:
        e_min = max(eq.r_b + K - N + 1, eq.r_a + d * K - d * N + 1)
    base = min(low, d * low, 0, e_min)
    # everything multiplied by z^(-base) to stay polynomial
    lhs = (eq.B * F).shift(low - base) - (eq.A * F.compose_power(d)).shift(d * low - base) - eq.C.shift(-base)
    for e in range(top, e_min - 1, -1):
        if lhs[e - base] != 0:
            return e
    return MINUS_INFINITY
