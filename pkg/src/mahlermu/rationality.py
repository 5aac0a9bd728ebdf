"""Tools for deciding when mu(f(b)) is rational.

B splits as scalar * B0 * Bm * Bc: a power of z, a part without cyclotomic
factors and a product of cyclotomic polynomials.  Two transformations keep
mu(f(b)) unchanged while simplifying the equation: g = z^K f removes z from
A, and g = Phi_n f cancels a cyclotomic factor shared by A and B.  A rational
shift f + lambda2/lambda1 can turn the equation homogeneous.  Failing that,
the four conditions on Bm and the eventual coprimality of the successor
numerators with Bc are checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Tuple

import mpmath
import sympy

from .algebra import ONE, Z, Polynomial, compose_mod, format_rational, poly_gcd
from .errors import EquationError, FreeParameterError, MahlerError, TransformError
from .series import LaurentSeries, MahlerEquation, expand


def rad(n: int) -> int:
    if n < 1:
        raise ValueError("rad needs n >= 1")
    return math.prod(sympy.primefactors(n))


def r_s_split(m: int, n: int) -> Tuple[int, int]:
    """(r, s): r the largest divisor of m coprime to n, s = m / r."""
    if m < 1 or n < 1:
        raise ValueError("r_s_split needs positive integers")
    r = m
    g = math.gcd(r, n)
    while g > 1:
        r //= g
        g = math.gcd(r, n)
    return r, m // r


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> Polynomial:
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    num = Polynomial.monomial(n) - ONE
    for k in sympy.divisors(n)[:-1]:
        num = num.exact_div(cyclotomic_poly(k))
    return num


def phi_compose_factorization(n: int, d: int) -> List[int]:
    """Indices m with Phi_n(z^d) = prod Phi_m."""
    r, s = r_s_split(d, n)
    return sorted(k * n * s for k in sympy.divisors(r))


def sigma_multiplicity(P: Polynomial, Q: Polynomial) -> int:
    if P.is_constant():
        raise EquationError("multiplicity of a constant polynomial is undefined")
    if not Q:
        raise EquationError("multiplicity in the zero polynomial is undefined")
    count = 0
    while True:
        q, r = Q.divrem(P)
        if r:
            return count
        Q = q
        count += 1


@dataclass(frozen=True)
class FactorSplit:
    B0: Polynomial
    Bm: Polynomial
    Bc: Polynomial
    scalar: Fraction
    cyclotomic: Tuple[Tuple[int, int], ...] = ()  # (n, multiplicity)

    def to_json(self) -> dict:
        return {
            "B0": self.B0.to_text(),
            "Bm": self.Bm.to_text(),
            "Bc": self.Bc.to_text(),
            "scalar": format_rational(self.scalar),
            "cyclotomic": [list(x) for x in self.cyclotomic],
        }


def _cyclotomic_candidates(degree: int):
    for n in range(1, 2 * degree * degree + 1):
        if sympy.totient(n) <= degree:
            yield n


def split_factors(B: Polynomial) -> FactorSplit:
    if not B:
        raise EquationError("cannot split the zero polynomial")
    scalar = B.leading
    rest = B.monic()
    v = rest.valuation()
    B0 = Polynomial.monomial(v)
    rest = rest.exact_div(B0)
    Bc = ONE
    found = []
    for n in _cyclotomic_candidates(max(rest.deg, 0)):
        if rest.is_constant():
            break
        phi = cyclotomic_poly(n)
        if phi.deg > rest.deg:
            continue
        e = sigma_multiplicity(phi, rest)
        if e:
            Bc = Bc * phi ** e
            rest = rest.exact_div(phi ** e)
            found.append((n, e))
    return FactorSplit(B0, rest, Bc, scalar, tuple(found))


def _cancel_common(A: Polynomial, B: Polynomial, C: Polynomial):
    g = poly_gcd(A, B)
    if C:
        g = poly_gcd(g, C)
    if g.is_constant():
        return A, B, C
    return A.exact_div(g), B.exact_div(g), (C.exact_div(g) if C else C)


def strip_z_powers(eq: MahlerEquation) -> Tuple[MahlerEquation, int]:
    """Equation for g = z^K f whose A has no root at 0, with the smallest K."""
    d = eq.d
    a = eq.A.valuation()
    if a == 0:
        return eq, 0
    need = [0, -((eq.B.valuation() - a) // (d - 1))]
    if eq.C:
        need.append(-((eq.C.valuation() - a) // d))
    K = max(need)
    A = eq.A
    B = eq.B.shift((d - 1) * K)
    C = eq.C.shift(d * K) if eq.C else eq.C
    m = min(A.valuation(), B.valuation(), C.valuation() if C else math.inf)
    A, B = A.shift(-m), B.shift(-m)
    C = C.shift(-m) if C else C
    return MahlerEquation(A, B, C, d, eq.homogeneous), K


def strip_common_cyclotomic(eq: MahlerEquation, n: int) -> MahlerEquation:
    """Equation for g = Phi_n f when Phi_n divides A and B and gcd(n, d) = 1."""
    d = eq.d
    if math.gcd(n, d) != 1:
        raise TransformError(f"cyclotomic strip needs gcd(n, d) = 1, got n = {n}, d = {d}")
    phi = cyclotomic_poly(n)
    if not phi.divides(eq.A) or not phi.divides(eq.B):
        raise TransformError(f"Phi_{n} does not divide both A and B")
    E = ONE
    for r in sympy.divisors(d)[1:]:
        E = E * cyclotomic_poly(r * n)
    A = eq.A.exact_div(phi)
    B = eq.B.exact_div(phi) * E
    C = eq.C * E
    A, B, C = _cancel_common(A, B, C)
    return MahlerEquation(A, B, C, d, eq.homogeneous)


def common_cyclotomic_indices(eq: MahlerEquation) -> List[int]:
    """n coprime to d with Phi_n dividing both A and B."""
    deg = min(eq.r_a, eq.r_b)
    if deg < 1:
        return []
    return [n for n in _cyclotomic_candidates(deg)
            if math.gcd(n, eq.d) == 1 and cyclotomic_poly(n).divides(eq.A) and cyclotomic_poly(n).divides(eq.B)]


def transformed_series(series: LaurentSeries, P: Polynomial, eq: MahlerEquation, n: Optional[int] = None) -> LaurentSeries:
    """Series of the equation `eq` whose leading part agrees with P * series."""
    n = n or series.known_count
    if series.known_count < n:
        series.extend(n)
    g = series.prefix(n).times_polynomial(P)
    try:
        return expand(eq, g.K, n)
    except FreeParameterError as exc:
        seeds = {k: g.coefficient(k) for k in exc.positions}
        return expand(eq, g.K, n, seeds)


# -- conversions to sympy, used for factoring and linear algebra

_X = sympy.Symbol("z")


def _to_sympy(P: Polynomial) -> sympy.Poly:
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(P.coeffs)], _X, domain="QQ")


def _from_sympy(P: sympy.Poly) -> Polynomial:
    return Polynomial([Fraction(int(c.p), int(c.q)) for c in reversed(P.all_coeffs())])


def irreducible_factors(P: Polynomial) -> List[Tuple[Polynomial, int]]:
    """Monic irreducible factors over Q with multiplicities."""
    if P.is_constant():
        return []
    _, facs = sympy.factor_list(_to_sympy(P))
    return [(_from_sympy(f).monic(), e) for f, e in facs]


def _monic_divisors(P: Polynomial, max_deg: int) -> List[Polynomial]:
    facs = irreducible_factors(P)
    out = []
    for exps in product(*[range(e + 1) for _, e in facs]):
        deg = sum(f.deg * k for (f, _), k in zip(facs, exps))
        if deg > max_deg:
            continue
        D = ONE
        for (f, _), k in zip(facs, exps):
            D = D * f ** k
        out.append(D)
    out.sort(key=lambda D: (D.deg, D.to_text()))
    return out


def lambda_identity_holds(eq: MahlerEquation, l1: Polynomial, l2: Polynomial) -> bool:
    d = eq.d
    l1d, l2d = l1.compose_power(d), l2.compose_power(d)
    return l1 * l1d * eq.C + l1d * l2 * eq.B == l1 * l2d * eq.A


def lambda_reduction_search(eq: MahlerEquation, deg_bound: int) -> Optional[Tuple[Polynomial, Polynomial]]:
    """(lambda1, lambda2) making f + lambda2/lambda1 satisfy the homogeneous equation."""
    if deg_bound < 0:
        raise ValueError("deg_bound must be >= 0")
    if not eq.C:
        return ONE, Polynomial()
    d = eq.d
    m = deg_bound
    for l1 in _monic_divisors(eq.B, deg_bound):
        l1d = l1.compose_power(d)
        # sum_j c_j (l1(z^d) z^j B - l1 z^(dj) A) = -l1 l1(z^d) C
        cols = [l1d * eq.B.shift(j) - l1 * eq.A.shift(d * j) for j in range(m + 1)]
        rhs = -(l1 * l1d * eq.C)
        rows = 1 + max([c.deg for c in cols if c] + [rhs.deg])
        M = sympy.Matrix(rows, m + 1, lambda i, j: sympy.Rational(cols[j][i].numerator, cols[j][i].denominator))
        b = sympy.Matrix(rows, 1, lambda i, _: sympy.Rational(rhs[i].numerator, rhs[i].denominator))
        try:
            sol, params = M.gauss_jordan_solve(b)
        except ValueError:
            continue
        if params.shape[0]:
            sol = sol.subs({p: 0 for p in params})
        l2 = Polynomial([Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in sol])
        if lambda_identity_holds(eq, l1, l2):
            return l1, l2
    return None


# -- the four conditions on the non-cyclotomic part of B

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
VACUOUS = "vacuous"


def _roots(P: Polynomial, dps: int):
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(P.coeffs)]
        return mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)


def _log_mahler_measure(P: Polynomial, dps: int):
    c, prim = P.primitive()
    lead = abs(prim.integer_parts()[0][-1])
    total = mpmath.log(lead)
    for r in _roots(prim, dps):
        total += max(mpmath.mpf(0), mpmath.log(abs(r)))
    return total


def _condition_a(eq: MahlerEquation, factors, dps: int) -> dict:
    if eq.A.is_constant():
        return {"status": SATISFIED, "detail": "A is constant"}
    logM_A = _log_mahler_measure(eq.A, dps)
    d = eq.d
    tested = 0
    for P, _ in factors:
        h = _log_mahler_measure(P, dps) / P.deg
        if h <= mpmath.mpf(10) ** (-dps // 2):
            return {"status": INCONCLUSIVE, "detail": f"factor {P.to_text()} has height too small to bound t"}
        # z0^(d^t) a root of A forces d^t h(z0) <= log M(A)
        ratio = logM_A / h
        t_max = int(mpmath.floor(mpmath.log(ratio) / mpmath.log(d))) + 1 if ratio >= 1 else 0
        for t in range(t_max + 1):
            tested = max(tested, t + 1)
            if not compose_mod(eq.A, d ** t, P):
                return {"status": VIOLATED, "detail": f"{P.to_text()} divides A(z^(d^{t}))", "t": t}
    return {"status": SATISFIED, "detail": f"exact gcd tests for t < {tested} (height bound)"}


def _condition_b(factors, dps: int):
    picked = []
    for P, _ in factors:
        roots = _roots(P, dps)
        best = max(roots, key=lambda r: abs(r))
        if abs(best) <= 1:
            return {"status": VIOLATED, "detail": f"all roots of {P.to_text()} lie in |z| <= 1"}, []
        picked.append((P, best))
    return {"status": SATISFIED, "detail": "every factor has a root outside the unit circle"}, picked


def _condition_d(eq: MahlerEquation, picked, dps: int, max_terms: int = 64) -> dict:
    if not eq.C:
        return {"status": VIOLATED, "detail": "C = 0"}
    A, B, C, d = eq.A, eq.B, eq.C, eq.d
    ABC = A * B * C
    lead = abs(ABC.leading)
    bound = 1 + max((abs(c) / lead for c in ABC.coeffs[:-1]), default=Fraction(0))
    evidence = []
    tol = mpmath.mpf(10) ** (-(dps // 2))
    with mpmath.workdps(dps):
        for P, z0 in picked:
            # least u with B(z0^(d^(t+1))) C(z0^(d^t)) != 0 for all t >= u, decided exactly
            t_big = 0
            mbound = mpmath.mpf(bound.numerator) / bound.denominator
            while abs(z0) ** (d ** t_big) <= mbound:
                t_big += 1
            u = 0
            for t in range(t_big + 1):
                if not compose_mod(B, d ** (t + 1), P) or not compose_mod(C, d ** t, P):
                    u = t + 1
            def ev(Q, x):
                return mpmath.polyval([mpmath.mpf(c.numerator) / c.denominator for c in reversed(Q.coeffs)], x)
            x = z0 ** (d ** u)
            term = mpmath.mpc(1)
            total = mpmath.mpc(0)
            ratios = []
            tail = None
            for k in range(max_terms):
                total += term
                x_next = x ** d
                ratio = ev(C, x_next) * ev(A, x) / (ev(C, x) * ev(B, x_next))
                ratios.append(ratio)
                term *= ratio
                x = x_next
                if len(ratios) >= 3 and abs(ratios[-1]) < 0.5 and abs(ratios[-1]) <= abs(ratios[-2]):
                    r = abs(ratios[-1])
                    tail = abs(term) / (1 - r)
                    if tail < tol or abs(term) == 0:
                        break
                if abs(x) > mpmath.mpf(10) ** (10 ** 6):
                    break
            positive = mpmath.im(z0) == 0 and mpmath.re(z0) > 0 and all(
                mpmath.im(q) == 0 and mpmath.re(q) > 0 for q in ratios[1:]) and A.leading * B.leading > 0
            row = {"factor": P.to_text(), "u": u, "partial_sum": mpmath.nstr(total, 15)}
            if positive and t_big <= u + len(ratios):
                row["status"] = SATISFIED
                row["detail"] = "monotone sum: all product terms positive"
            elif tail is not None and abs(total) > tail + tol:
                row["status"] = SATISFIED
                row["detail"] = "partial sum exceeds the certified tail"
                row["tail"] = mpmath.nstr(tail, 5)
            else:
                row["status"] = INCONCLUSIVE
                row["detail"] = "cannot separate the sum from 0 at this precision"
            evidence.append(row)
    status = SATISFIED if all(r["status"] == SATISFIED for r in evidence) else INCONCLUSIVE
    return {"status": status, "factors": evidence}


def lemma42_report(eq: MahlerEquation, series: LaurentSeries, digits: int = 50) -> Dict[str, dict]:
    split = split_factors(eq.B)
    if split.Bm.is_constant():
        msg = {"status": VACUOUS, "detail": "no non-cyclotomic part"}
        return {k: dict(msg) for k in "abcd"}
    dps = max(30, min(digits, 80))
    factors = irreducible_factors(split.Bm)
    out = {"a": _condition_a(eq, factors, dps)}
    out["b"], picked = _condition_b(factors, dps)
    K = series.K
    rc = eq.r_c
    ok = eq.C and rc > eq.d * K + eq.r_a
    out["c"] = {"status": SATISFIED if ok else VIOLATED,
                "detail": f"deg C = {rc if eq.C else '-inf'}, d K + deg A = {eq.d * K + eq.r_a}"}
    if picked:
        out["d"] = _condition_d(eq, picked, dps)
    else:
        out["d"] = {"status": INCONCLUSIVE, "detail": "no root outside the unit circle to test"}
    return out


# -- verdict

CERTIFIED = "certified-rational"
CONDITIONS_MET = "conditions-met"
UNDECIDED = "inconclusive"


@dataclass
class RationalityReport:
    transforms: List[dict]
    equation: MahlerEquation
    split: FactorSplit
    lemma42: Dict[str, dict]
    lambda_pair: Optional[Tuple[Polynomial, Polynomial]]
    premise: dict
    verdict: str
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        lam = None
        if self.lambda_pair is not None:
            lam = {"lambda1": self.lambda_pair[0].to_text(), "lambda2": self.lambda_pair[1].to_text()}
        return {
            "verdict": self.verdict,
            "transforms": self.transforms,
            "equation": self.equation.to_json(),
            "split": self.split.to_json(),
            "conditions": self.lemma42,
            "lambda_reduction": lam,
            "cyclotomic_premise": self.premise,
            "notes": self.notes,
        }


def sample_sequences(eq: MahlerEquation, series: LaurentSeries, steps: int = 12, horizon: int = 48, limit: int = 3):
    """Primitive sequences from the first few primitive gaps up to `horizon`."""
    from .cfrac import cf_expand
    from .gaps import classify, enumerate_gaps, iterate_primitive

    cf = cf_expand(series, horizon + 1)
    recs = classify(enumerate_gaps(cf, horizon), eq)
    prims = [r for r in recs if r.primitive][:limit]
    return [iterate_primitive(r, eq, steps) for r in prims]


def _premise(eq: MahlerEquation, Bc: Polynomial, sequences) -> dict:
    if Bc.is_constant():
        return {"status": VACUOUS, "detail": "B has no cyclotomic part"}
    if not sequences:
        return {"status": INCONCLUSIVE, "detail": "no primitive sequence available to test"}
    rows = []
    holds = True
    for seq in sequences:
        flags = [poly_gcd(res % Bc, Bc).is_constant() if res % Bc else False
                 for res in seq.numerator_residues]
        tail = flags[len(flags) // 2:]
        rows.append({"start": seq.start.as_list(), "coprime": flags})
        if not tail or not all(tail):
            holds = False
    status = SATISFIED if holds else INCONCLUSIVE
    detail = ("coprime with Bc at every checked step of the second half (evidence, not proof)"
              if holds else "not coprime with Bc late in a computed sequence")
    return {"status": status, "detail": detail, "sequences": rows}


def rationality_verdict(eq: MahlerEquation, series: LaurentSeries, sequences=None,
                        digits: int = 50, deg_bound: Optional[int] = None) -> RationalityReport:
    transforms = []
    notes = []
    cur, K = strip_z_powers(eq)
    P = Z ** K if K else ONE
    if K:
        transforms.append({"type": "z-power", "K": K})
    while True:
        idx = common_cyclotomic_indices(cur)
        if not idx:
            break
        n = idx[0]
        cur = strip_common_cyclotomic(cur, n)
        P = P * cyclotomic_poly(n)
        transforms.append({"type": "cyclotomic", "n": n})
    skipped = [n for n in _cyclotomic_candidates(min(cur.r_a, cur.r_b))
               if math.gcd(n, cur.d) != 1 and cyclotomic_poly(n).divides(cur.A)
               and cyclotomic_poly(n).divides(cur.B)] if min(cur.r_a, cur.r_b) >= 1 else []
    if skipped:
        notes.append(f"Phi_n shared by A and B but not strippable (gcd(n, d) > 1): n in {skipped}")
    if transforms:
        cur_series = transformed_series(series, P, cur, max(series.known_count, 64))
        sequences = None
    else:
        cur_series = series
    split = split_factors(cur.B)
    bound = deg_bound if deg_bound is not None else max(2, cur.r_b)
    pair = lambda_reduction_search(cur, bound)
    if pair is not None:
        premise = {"status": VACUOUS, "detail": "equation reduces to the homogeneous case"}
        cond = {k: {"status": VACUOUS, "detail": "not needed"} for k in "abcd"}
        return RationalityReport(transforms, cur, split, cond, pair, premise, CERTIFIED, notes)
    cond = lemma42_report(cur, cur_series, digits)
    if sequences is None and not split.Bc.is_constant():
        try:
            sequences = sample_sequences(cur, cur_series)
        except MahlerError as exc:
            notes.append(f"no sequences sampled: {exc}")
            sequences = []
    premise = _premise(cur, split.Bc, sequences or [])
    bm_ok = all(c["status"] in (SATISFIED, VACUOUS) for c in cond.values())
    prem_ok = premise["status"] in (SATISFIED, VACUOUS)
    verdict = CONDITIONS_MET if bm_ok and prem_ok else UNDECIDED
    return RationalityReport(transforms, cur, split, cond, None, premise, verdict, notes)
