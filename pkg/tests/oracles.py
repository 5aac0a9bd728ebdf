"""Independent reference computations used to derive frozen test values.

Nothing here imports the package's algorithms: coefficients come from a
direct recurrence, denominator degrees from Hankel determinants, gcds and
cyclotomic polynomials from sympy, and orbit limits from closed forms.
"""

from fractions import Fraction
from typing import List, Optional

import sympy

z = sympy.Symbol("z")


def explicit_coefficients(A, B, C, d, K, n) -> Optional[List[Fraction]]:
    """f_0..f_{n-1} of f = sum f_j z^(K-j) by forward substitution.

    A, B, C are coefficient lists (constant first).  Only valid when the
    B f term alone carries the top power, i.e. deg B + K > deg A + d K and
    deg B + K >= deg C; returns None otherwise.
    """
    ra, rb = len(A) - 1, len(B) - 1
    rc = len(C) - 1 if C else -1
    if not (rb + K > ra + d * K and rb + K >= rc):
        return None
    lead = Fraction(B[rb])
    f: List[Fraction] = []
    for m in range(n):
        e = rb + K - m  # exponent being matched
        rhs = Fraction(C[e]) if 0 <= e < len(C) else Fraction(0)
        for i, a in enumerate(A):
            num = i + d * K - e
            if a and num % d == 0:
                j = num // d
                if 0 <= j < m:
                    rhs += Fraction(a) * f[j]
        for i in range(rb):
            j = m - rb + i
            if B[i] and 0 <= j < m:
                rhs -= Fraction(B[i]) * f[j]
        f.append(rhs / lead)
    return f


def _det(rows) -> Fraction:
    """Determinant by fraction Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            t = m[r][c] / m[c][c]
            if t:
                for k in range(c, n):
                    m[r][k] -= t * m[c][k]
    return det


def hankel_degrees(coeffs, K, up_to) -> List[int]:
    """Degrees n <= up_to of convergent denominators.

    n belongs to the set iff the n x n Hankel determinant of the
    coefficients of z^-1, z^-2, ... is nonzero (n = 0 always does).
    """
    tail = [Fraction(0)] * max(0, -K - 1) + [Fraction(x) for x in coeffs[max(0, K + 1):]]
    out = [0]
    for n in range(1, up_to + 1):
        if 2 * n - 1 > len(tail):
            break
        if _det([[tail[i + j] for j in range(n)] for i in range(n)]) != 0:
            out.append(n)
    return out


def to_sympy(coeffs):
    return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in coeffs])) or [0], z)


def worked_trail(n):
    """(u_n, v_n) of the worked d = 3 family: ((3^n - 1)/2, 3^n)."""
    return (3 ** n - 1) // 2, 3 ** n


def constant_limit(u0, v0, g, d, ra, rb) -> Fraction:
    """lim v_n/u_n for u' = d u + rb - g, v' = d v - ra + g.

    Solving the affine recurrences: u_n = d^n (u0 + a) - a with
    a = (rb - g)/(d - 1), and v_n = d^n (v0 + c) - c with c = (g - ra)/(d - 1).
    """
    a = Fraction(rb - g, d - 1)
    c = Fraction(g - ra, d - 1)
    return (v0 + c) / (u0 + a)


def orbit_ratio(u0, v0, block, d, ra, rb, supersteps) -> Fraction:
    u, v = Fraction(u0), Fraction(v0)
    for _ in range(supersteps):
        for g in block:
            u, v = d * u + rb - g, d * v - ra + g
    return v / u


def cyclotomic(n):
    return sympy.Poly(sympy.cyclotomic_poly(n, z), z)


def totient(n):
    return int(sympy.totient(n))
