"""Gaps of Phi(f), their successors, and primitive gap sequences.

Phi(f) is the set of convergent denominator degrees.  A gap [u, v] is big
when (v - u)(d - 1) > r_a + r_b; the convergent p/q with deg q = u then
yields another convergent

    (A p(z^d) + C q(z^d)) / (B q(z^d))

after cancelling G = gcd of numerator and denominator, with gap
[d u + r_b - deg G, d v - r_a + deg G].

Computing G.  Since p and q are coprime, so are p(z^d) and q(z^d); hence
gcd(N, q(z^d)) = gcd(A, q(z^d)) for N = A p(z^d) + C q(z^d), and a valuation
count shows G = gcd(N, L) with L = B * gcd(A, q(z^d)), a divisor of A*B.  So
r_g only depends on N and q(z^d) modulo A*B.

Tracking a sequence.  Let R = A*B and let G_k have as roots the d^k-th powers
of the roots of R.  With T_j = G_1 ... G_{n-j}, the polynomial T_j(z^d) is a
multiple of R*T_{j+1}, and the gcd G_j divides R.  Knowing p_j, q_j modulo
T_j is therefore enough to get r_{g,j} and p_{j+1}, q_{j+1} modulo T_{j+1}.
The moduli have degree (n - j) deg R, so the sequence can be followed far
beyond the point where p_j, q_j themselves could be stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_gcd, gf_monic, gf_mul, gf_quo, gf_rem, gf_strip

from .algebra import ONE, Polynomial, graeffe, poly_gcd, compose_mod
from .cfrac import CFExpansion, Convergent
from .errors import InsufficientExpansion, LowerBoundUndefined
from .series import MahlerEquation

EXACT_BUDGET = 100_000
MODULUS_BIT_BUDGET = 64_000


@dataclass(frozen=True, order=True)
class Gap:
    u: int
    v: int

    def __post_init__(self):
        if not 0 <= self.u < self.v:
            raise ValueError(f"invalid gap [{self.u}, {self.v}]")

    @property
    def size(self) -> int:
        return self.v - self.u

    def as_list(self):
        return [self.u, self.v]


@dataclass
class GapRecord:
    gap: Gap
    convergent: Convergent
    big: bool = False
    primitive: bool = False
    successor_of: Optional[int] = None


@dataclass
class SequenceStep:
    u: int
    v: int
    r_g: Optional[int]
    p: Optional[Polynomial] = None
    q: Optional[Polynomial] = None


@dataclass
class PrimitiveSequence:
    start: Gap
    steps: List[SequenceStep]
    # N_n = A p(z^d) + C q(z^d) reduced mod A*B, one per computed r_g
    numerator_residues: List[Polynomial] = field(default_factory=list)
    note: Optional[str] = None
    modular_from: Optional[int] = None  # first step whose r_g was found modulo primes

    @property
    def r_g(self) -> List[int]:
        return [s.r_g for s in self.steps if s.r_g is not None]

    @property
    def gaps(self) -> List[Gap]:
        return [Gap(s.u, s.v) for s in self.steps]

    @property
    def records(self):
        return [(s.u, s.v, s.r_g, s.p, s.q) for s in self.steps]


def is_big(gap: Gap, eq: MahlerEquation) -> bool:
    return gap.size * (eq.d - 1) > eq.r_a + eq.r_b


def enumerate_gaps(cf: CFExpansion, up_to_u: int) -> List[GapRecord]:
    degs = cf.degrees
    if degs[-1] <= up_to_u and not cf.terminated:
        raise InsufficientExpansion(f"expansion certified only through degree {degs[-1]}")
    out = []
    for k in range(len(degs) - 1):
        if degs[k] > up_to_u:
            break
        out.append(GapRecord(Gap(degs[k], degs[k + 1]), cf.convergent(k)))
    return out


def successor_gcd(eq: MahlerEquation, N: Polynomial, Qd: Polynomial) -> Polynomial:
    """gcd(N, B*Qd) for N = A p(z^d) + C q(z^d), Qd = q(z^d), p and q coprime.

    N and Qd only matter modulo A*B, so residues may be passed instead.
    """
    A, B = eq.A, eq.B
    gA = ONE if A.is_constant() else poly_gcd(A, Qd % A)
    L = (B * gA).monic()
    return poly_gcd(N % L, L)


def successor_fraction(eq: MahlerEquation, p: Polynomial, q: Polynomial):
    d = eq.d
    R = eq.A * eq.B
    Qr = compose_mod(q, d, R)
    G = successor_gcd(eq, (eq.A * compose_mod(p, d, R) + eq.C * Qr) % R, Qr)
    Qd = q.compose_power(d)
    N = eq.A * p.compose_power(d) + eq.C * Qd
    D = eq.B * Qd
    if G.deg > 0:
        N, D = N.exact_div(G), D.exact_div(G)
    return N, D, G.deg


def successor_gap(gap: Gap, eq: MahlerEquation, r_g: int) -> Gap:
    return Gap(eq.d * gap.u + eq.r_b - r_g, eq.d * gap.v - eq.r_a + r_g)


def direct_successor(rec: GapRecord, eq: MahlerEquation):
    """(Convergent, Gap, r_g) of the successor of a big gap."""
    if not is_big(rec.gap, eq):
        raise ValueError("direct successor needs a big gap")
    c = rec.convergent
    p, q, r_g = successor_fraction(eq, c.p, c.q)
    gap = successor_gap(rec.gap, eq, r_g)
    assert q.deg == gap.u
    assert 0 <= r_g <= eq.r_a + eq.r_b
    return Convergent(None, p, q), gap, r_g


def classify(records: List[GapRecord], eq: MahlerEquation) -> List[GapRecord]:
    out = [replace(r, big=is_big(r.gap, eq), primitive=False, successor_of=None) for r in records]
    by_u = {r.gap.u: i for i, r in enumerate(out)}
    for i, rec in enumerate(out):
        if not rec.big:
            continue
        conv, gap, _ = direct_successor(rec, eq)
        j = by_u.get(gap.u)
        if j is None:
            continue
        target = out[j]
        same = target.gap == gap and target.convergent.p * conv.q == conv.p * target.convergent.q
        if not same:
            raise AssertionError(f"successor of {rec.gap} disagrees with the expansion at u = {gap.u}")
        target.successor_of = i
    for rec in out:
        rec.primitive = rec.big and rec.successor_of is None
    return out


def _moduli(eq: MahlerEquation, transitions: int, bit_budget: int):
    """Suffix products T_j = G_1 ... G_{n-j}, shortening n to respect the budget."""
    R = (eq.A * eq.B).monic()
    chain = [R]
    bits = R.height_bits() * (R.deg + 1)
    for _ in range(transitions):
        nxt = graeffe(chain[-1], eq.d)
        bits += nxt.height_bits() * (nxt.deg + 1)
        if bits > bit_budget:
            break
        chain.append(nxt)
    n = len(chain) - 1
    T = [ONE] * (n + 1)
    for j in range(n - 1, -1, -1):
        T[j] = T[j + 1] * chain[n - j]
    return R, n, T


def _track_exact(rec: GapRecord, eq: MahlerEquation, need: int, bit_budget: int):
    """r_g values and numerator residues mod A*B over Q, as far as the budget allows."""
    d, A, B, C = eq.d, eq.A, eq.B, eq.C
    R, n, T = _moduli(eq, need, bit_budget)
    P = rec.convergent.p % T[0]
    Q = rec.convergent.q % T[0]
    r_g, residues = [], []
    for j in range(min(n, need)):
        S = R * T[j + 1]
        Pd = P.compose_power(d) % S
        Qd = Q.compose_power(d) % S
        Nres = (A * Pd + C * Qd) % S
        G = successor_gcd(eq, Nres, Qd)
        r_g.append(G.deg)
        residues.append(Nres % R)
        modulus = G * T[j + 1]
        P = (Nres % modulus).exact_div(G)
        Q = ((B * Qd) % modulus).exact_div(G)
    return r_g, residues


# -- the same tracker over F_p, for sequences whose moduli outgrow the bit budget

TRACK_PRIMES = (2305843009213693951, 4611686018427387847)


def _fp(poly: Polynomial, p: int):
    """Coefficients mod p, highest first; None when a denominator vanishes mod p."""
    num, den = poly.integer_parts()
    if den % p == 0:
        return None
    inv = pow(den, -1, p)
    return gf_strip([ZZ(c * inv % p) for c in reversed(num)])


def _fp_compose_power(f, d: int):
    out = []
    for i, c in enumerate(f):
        out.append(c)
        if i < len(f) - 1:
            out.extend([ZZ(0)] * (d - 1))
    return out


def _fp_charpoly_of_power(f, e: int, p: int):
    """Monic polynomial whose roots are the e-th powers of the roots of monic f."""
    n = len(f) - 1
    low = list(reversed(f))  # low[i] = coefficient of z^i
    comp = [[0] * n for _ in range(n)]
    for i in range(1, n):
        comp[i][i - 1] = 1
    for i in range(n):
        comp[i][n - 1] = -low[i] % p

    def mul(a, b):
        return [[sum(a[i][t] * b[t][j] for t in range(n)) % p for j in range(n)] for i in range(n)]

    M, base = None, comp
    while e:
        if e & 1:
            M = base if M is None else mul(M, base)
        e >>= 1
        if e:
            base = mul(base, base)
    # Faddeev-LeVerrier mod p (p exceeds n)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        prod = mul(M, mk)
        for i in range(n):
            prod[i][i] = (prod[i][i] + coeffs[n - k + 1]) % p
        mk = prod
        tr = sum(sum(M[i][t] * mk[t][i] for t in range(n)) for i in range(n)) % p
        coeffs[n - k] = -tr * pow(k, -1, p) % p
    return [ZZ(c) for c in reversed(coeffs)]


def _track_mod(rec: GapRecord, eq: MahlerEquation, need: int, p: int) -> Optional[List[int]]:
    d = eq.d
    A, B, C = (_fp(x, p) for x in (eq.A, eq.B, eq.C))
    p0, q0 = _fp(rec.convergent.p, p), _fp(rec.convergent.q, p)
    if None in (A, B, C, p0, q0) or not A or not B or len(A) - 1 != eq.r_a or len(B) - 1 != eq.r_b:
        return None
    R = gf_monic(gf_mul(A, B, p, ZZ), p, ZZ)[1]
    chain = [R]
    for k in range(need):
        chain.append(_fp_charpoly_of_power(R, d ** (k + 1), p))
    T = [[ZZ(1)]] * (need + 1)
    for j in range(need - 1, -1, -1):
        T[j] = gf_mul(T[j + 1], chain[need - j], p, ZZ)
    P, Q = gf_rem(p0, T[0], p, ZZ), gf_rem(q0, T[0], p, ZZ)
    out = []
    for j in range(need):
        S = gf_mul(R, T[j + 1], p, ZZ)
        Pd = gf_rem(_fp_compose_power(P, d), S, p, ZZ)
        Qd = gf_rem(_fp_compose_power(Q, d), S, p, ZZ)
        N = gf_rem(gf_add(gf_mul(A, Pd, p, ZZ), gf_mul(C, Qd, p, ZZ), p, ZZ), S, p, ZZ)
        gA = gf_gcd(A, gf_rem(Qd, A, p, ZZ), p, ZZ) if len(A) > 1 else [ZZ(1)]
        L = gf_mul(B, gA, p, ZZ)
        G = gf_gcd(gf_rem(N, L, p, ZZ), L, p, ZZ)
        out.append(len(G) - 1)
        mod = gf_mul(G, T[j + 1], p, ZZ)
        P = gf_quo(gf_rem(N, mod, p, ZZ), G, p, ZZ)
        Q = gf_quo(gf_rem(gf_mul(B, Qd, p, ZZ), mod, p, ZZ), G, p, ZZ)
    return out


def _exact_cost(p: Polynomial, q: Polynomial, eq: MahlerEquation) -> int:
    words = max(1, -(-max(p.height_bits(), q.height_bits()) // 64))
    return eq.d * max(p.deg, q.deg, 1) * (eq.r_a + eq.r_b + 2) * words


def iterate_primitive(rec: GapRecord, eq: MahlerEquation, steps: int,
                      exact_budget: int = EXACT_BUDGET,
                      bit_budget: int = MODULUS_BIT_BUDGET,
                      primes=TRACK_PRIMES) -> PrimitiveSequence:
    """Follow the successors of a big gap for `steps` steps.

    Every step records u_n, v_n and r_{g,n} (the gcd degree leaving step n).
    r_g comes from the bounded-modulus tracker over Q.  Where its moduli
    outgrow `bit_budget`, the tracker is rerun modulo each prime in `primes`;
    the values are used only when all primes agree with each other and with
    the rational prefix, and the sequence records where they start.  A prime
    can only overstate a gcd degree, never understate it.  The polynomials
    p, q are kept while a successor step fits in `exact_budget` and are
    cross-checked against r_g.
    """
    if not rec.big:
        raise ValueError("primitive sequences start at a big gap")
    need = steps + 1
    r_g, residues = _track_exact(rec, eq, need, bit_budget)
    note = None
    modular_from = None
    if len(r_g) < need:
        runs = [_track_mod(rec, eq, need, p) for p in primes]
        runs = [r for r in runs if r is not None]
        if len(runs) >= 2 and all(r == runs[0] for r in runs) and runs[0][:len(r_g)] == r_g:
            modular_from = len(r_g)
            r_g = runs[0]
            note = f"r_g from step {modular_from} on computed modulo {len(runs)} primes"
        else:
            note = f"modulus budget allows {len(r_g)} of {need} gcd computations"
    p, q = rec.convergent.p, rec.convergent.q
    gap = rec.gap
    out: List[SequenceStep] = []
    for j in range(need):
        rg = r_g[j] if j < len(r_g) else None
        step = SequenceStep(gap.u, gap.v, rg)
        if p is not None:
            step.p, step.q = p, q
            if _exact_cost(p, q, eq) <= exact_budget:
                p, q, exact_rg = successor_fraction(eq, p, q)
                if rg is None:
                    rg = step.r_g = exact_rg
                    r_g.append(rg)
                assert exact_rg == rg
            else:
                p = q = None
        out.append(step)
        if rg is None:
            break
        if j < need - 1:
            nxt = successor_gap(gap, eq, rg)
            assert nxt.size > gap.size
            gap = nxt
    return PrimitiveSequence(rec.gap, out, residues, note, modular_from)


def horizon_S(eq: MahlerEquation) -> Fraction:
    """Upper bound on the size of a primitive gap."""
    return Fraction((2 * eq.d - 1) * (eq.r_a + eq.r_b), eq.d - 1)


def contribution_bounds(gap: Gap, eq: MahlerEquation):
    """Bounds on limsup v_n/u_n along the successor chain of `gap`."""
    d1 = eq.d - 1
    ra, rb = Fraction(eq.r_a, d1), Fraction(eq.r_b, d1)
    if gap.u == 0 and eq.r_b == 0:
        raise LowerBoundUndefined()
    lower = (gap.v - ra) / (gap.u + rb)
    upper = None
    if gap.u * d1 > eq.r_a:
        upper = (gap.v + rb) / (gap.u - ra)
    return lower, upper


def search_horizon(first_big: Gap, eq: MahlerEquation) -> int:
    """Largest u at which a primitive gap could still beat the anchor's lower bound."""
    d1 = eq.d - 1
    ra, rb = Fraction(eq.r_a, d1), Fraction(eq.r_b, d1)
    S = horizon_S(eq)
    anchor, _ = contribution_bounds(first_big, eq)
    # (u + S + rb) / (u - ra) > anchor  <=>  u < (S + rb + anchor*ra) / (anchor - 1)
    bound = (S + rb + anchor * ra) / (anchor - 1)
    u = bound.numerator // bound.denominator
    if u == bound:
        u -= 1
    return max(u, 0)
