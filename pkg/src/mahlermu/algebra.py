"""Exact dense univariate polynomials over Q.

A polynomial is stored as a tuple of integer numerators together with one
positive common denominator, kept in lowest terms.  All arithmetic is done on
Python integers, which keeps the inner loops free of per-coefficient
``Fraction`` normalisation.  Coefficients are still exposed as ``Fraction``.

The degree of the zero polynomial is ``MINUS_INFINITY`` (a float sentinel),
never an ordinary integer.
"""

from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ParseError, UndefinedGcdError, ZeroDivisorError

MINUS_INFINITY = float("-inf")

Rational = Fraction
Scalar = Union[int, Fraction]

# below this size schoolbook multiplication beats packing into big integers
_KRONECKER_MIN = 48


@contextmanager
def _long_int_text():
    """Lift the interpreter's int/str conversion limit; CF quotients exceed it."""
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        if not text:
            raise ParseError("empty rational")
        num, sep, den = text.partition("/")
        try:
            with _long_int_text():
                n = int(num)
                m = int(den) if sep else 1
        except ValueError:
            raise ParseError(f"malformed rational {value!r}") from None
        if m == 0:
            raise ParseError(f"malformed rational {value!r}: zero denominator")
        return Fraction(n, m)
    raise ParseError(f"not a rational: {value!r}")


def format_rational(x: Fraction) -> str:
    with _long_int_text():
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# integer coefficient-list kernels (lowest degree first, no trailing zeros)


def _strip(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _content(a: Sequence[int]) -> int:
    g = 0
    for x in a:
        if x:
            g = math.gcd(g, x)
            if g == 1:
                return 1
    return g


def _add(a: Sequence[int], b: Sequence[int]) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _strip(out)


def _scale(a: Sequence[int], c: int) -> list:
    if c == 0:
        return []
    return [x * c for x in a]


def _mul_school(a: Sequence[int], b: Sequence[int]) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, y in enumerate(b):
        if y:
            for i, x in enumerate(a):
                out[i + j] += x * y
    return out


def _pack(a: Sequence[int], nbytes: int) -> int:
    return int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in a), "little")


def _unpack(value: int, nbytes: int, count: int) -> list:
    raw = value.to_bytes(nbytes * count, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(count)]


def _split_signs(a: Sequence[int]):
    pos = [x if x > 0 else 0 for x in a]
    neg = [-x if x < 0 else 0 for x in a]
    return pos, neg


def _mul_kronecker(a: Sequence[int], b: Sequence[int]) -> list:
    n = len(a) + len(b) - 1
    bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 8) // 8
    ap, an = _split_signs(a)
    bp, bn = _split_signs(b)
    pa, na, pb, nb = (_pack(x, nbytes) for x in (ap, an, bp, bn))
    plus = _unpack(pa * pb + na * nb, nbytes, n)
    minus = _unpack(pa * nb + na * pb, nbytes, n)
    return [x - y for x, y in zip(plus, minus)]


def _mul(a: Sequence[int], b: Sequence[int]) -> list:
    if not a or not b:
        return []
    if min(len(a), len(b)) < _KRONECKER_MIN:
        return _strip(_mul_school(a, b))
    return _strip(_mul_kronecker(a, b))


def _divrem_int(a: Sequence[int], b: Sequence[int]):
    """Pseudo-division: returns (q, r, s) with s*a = q*b + r, s = lc(b)**k."""
    db = len(b) - 1
    lc = b[-1]
    k = len(a) - db
    if k <= 0:
        return [], list(a), 1
    scale = 1 if abs(lc) == 1 else lc ** k
    r = list(a) if scale == 1 else [x * scale for x in a]
    q = [0] * k
    for i in range(k - 1, -1, -1):
        top = r[i + db]
        if top == 0:
            continue
        if abs(lc) == 1:
            coef = top * lc
        else:
            coef, rem = divmod(top, lc)
            assert rem == 0
        q[i] = coef
        for j in range(db):
            if b[j]:
                r[i + j] -= coef * b[j]
        r[i + db] = 0
    return _strip(q), _strip(r[:db]), scale


def _primitive(a: Sequence[int]) -> list:
    g = _content(a)
    if a and a[-1] < 0:
        g = -g
    return [x // g for x in a]


# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        fr = [to_rational(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        num = [c.numerator * (den // c.denominator) for c in fr]
        self._set(num, den)

    def _set(self, num: list, den: int) -> None:
        _strip(num)
        if not num:
            den = 1
        else:
            if den < 0:
                num = [-x for x in num]
                den = -den
            # gcd(content, den), starting from the (usually small) denominator
            g = den
            for x in num:
                if g == 1:
                    break
                if x:
                    g = math.gcd(g, x)
            if g > 1:
                num = [x // g for x in num]
                den //= g
        self._num = tuple(num)
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, num: list, den: int = 1) -> "Polynomial":
        p = object.__new__(cls)
        p._set(list(num), den)
        return p

    @classmethod
    def monomial(cls, n: int, c: Scalar = 1) -> "Polynomial":
        return cls([0] * n + [c])

    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls([c])

    @classmethod
    def from_integer_parts(cls, num: Sequence[int], den: int = 1) -> "Polynomial":
        return cls._raw(list(num), den)

    # -- inspection ---------------------------------------------------------

    @property
    def deg(self):
        return len(self._num) - 1 if self._num else MINUS_INFINITY

    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(x, self._den) for x in self._num)

    def integer_parts(self):
        """(numerators, denominator) with every coefficient = numerator/denominator."""
        return self._num, self._den

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._num):
            return Fraction(self._num[i], self._den)
        return Fraction(0)

    def __len__(self) -> int:
        return len(self._num)

    @property
    def leading(self) -> Fraction:
        if not self._num:
            return Fraction(0)
        return Fraction(self._num[-1], self._den)

    def is_zero(self) -> bool:
        return not self._num

    def __bool__(self) -> bool:
        return bool(self._num)

    def is_constant(self) -> bool:
        return len(self._num) <= 1

    def valuation(self):
        """Order of vanishing at z = 0 (infinite for the zero polynomial)."""
        for i, x in enumerate(self._num):
            if x:
                return i
        return math.inf

    def height_bits(self) -> int:
        if not self._num:
            return 0
        return max(abs(x).bit_length() for x in self._num) + self._den.bit_length()

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        den = self._den * other._den // math.gcd(self._den, other._den)
        a = _scale(self._num, den // self._den)
        b = _scale(other._num, den // other._den)
        return Polynomial._raw(_add(a, b), den)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw([-x for x in self._num], self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial._raw(_mul(self._num, other._num), self._den * other._den)
        if isinstance(other, int) and not isinstance(other, bool):
            return Polynomial._raw(_scale(self._num, other), self._den)
        if isinstance(other, Fraction):
            return Polynomial._raw(_scale(self._num, other.numerator), self._den * other.denominator)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisorError()
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def divrem(self, other: "Polynomial"):
        other = self._coerce(other)
        if not other:
            raise ZeroDivisorError()
        q, r, s = _divrem_int(self._num, other._num)
        # s*num_a = q*num_b + r, with a = num_a/den_a and b = num_b/den_b
        quo = Polynomial._raw(_scale(q, other._den), self._den * s)
        rem = Polynomial._raw(r, self._den * s)
        return quo, rem

    def __floordiv__(self, other):
        return self.divrem(other)[0]

    def __mod__(self, other):
        return self.divrem(other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divrem(other)
        if r:
            raise ValueError("division is not exact")
        return q

    def divides(self, other: "Polynomial") -> bool:
        """True when self divides other."""
        return not (other % self)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._num == other._num and self._den == other._den
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == Polynomial([other])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._num, self._den))
        return self._hash

    # -- structural operations ----------------------------------------------

    def compose_power(self, e: int) -> "Polynomial":
        """p(z**e)."""
        if e < 1:
            raise ValueError("exponent must be positive")
        if e == 1 or len(self._num) <= 1:
            return self
        out = [0] * ((len(self._num) - 1) * e + 1)
        out[::e] = self._num
        return Polynomial._raw(out, self._den)

    def shift(self, k: int) -> "Polynomial":
        """Multiply by z**k; negative k divides and requires exactness."""
        if not self._num or k == 0:
            return self
        if k > 0:
            return Polynomial._raw([0] * k + list(self._num), self._den)
        if any(self._num[:-k]):
            raise ValueError("shift would drop nonzero coefficients")
        return Polynomial._raw(list(self._num[-k:]), self._den)

    def monic(self) -> "Polynomial":
        if not self._num:
            return self
        lc = self._num[-1]
        return Polynomial._raw(list(self._num), lc) if lc > 0 else Polynomial._raw([-x for x in self._num], -lc)

    def primitive(self):
        """(c, P) with self = c*P, P integral with content 1 and positive leading coefficient."""
        if not self._num:
            raise ValueError("zero polynomial has no primitive part")
        prim = _primitive(self._num)
        c = Fraction(self._num[-1], self._den * prim[-1])
        return c, Polynomial._raw(prim, 1)

    def __call__(self, x):
        """Evaluate; exact for ints and Fractions, Horner in x's own type otherwise."""
        if not self._num:
            return Fraction(0) if isinstance(x, (int, Fraction)) else x * 0
        if isinstance(x, int) and not isinstance(x, bool):
            acc = 0
            for c in reversed(self._num):
                acc = acc * x + c
            return Fraction(acc, self._den)
        if isinstance(x, Fraction):
            n, m = x.numerator, x.denominator
            acc = 0
            power = 1
            for c in reversed(self._num):
                acc = acc * n + c * power
                power *= m
            return Fraction(acc, self._den * power // m)
        acc = x * 0
        for c in reversed(self._num):
            acc = acc * x + c
        return acc / self._den

    # -- text -----------------------------------------------------------------

    def to_text(self) -> list:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_text(cls, items) -> "Polynomial":
        if not isinstance(items, (list, tuple)):
            raise ParseError("polynomial must be a list of rationals")
        return cls(to_rational(x) for x in items)

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"

    def __str__(self):
        if not self._num:
            return "0"
        terms = []
        for i in range(len(self._num) - 1, -1, -1):
            c = Fraction(self._num[i], self._den)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = format_rational(mag)
            else:
                mono = "z" if i == 1 else f"z^{i}"
                body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


Z = Polynomial([0, 1])
ONE = Polynomial([1])
ZERO = Polynomial([])


def poly_deg(p: Polynomial):
    return p.deg


def poly_divrem(a: Polynomial, b: Polynomial):
    return a.divrem(b)


def poly_compose_power(p: Polynomial, e: int) -> Polynomial:
    return p.compose_power(e)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd, computed with a primitive remainder sequence over Z."""
    if not a and not b:
        raise UndefinedGcdError()
    if not b:
        return a.monic()
    if not a:
        return b.monic()
    x = _primitive(a.integer_parts()[0])
    y = _primitive(b.integer_parts()[0])
    if len(x) < len(y):
        x, y = y, x
    while y:
        if len(y) == 1:
            return ONE
        _, r, _ = _divrem_int(x, y)
        x, y = y, (_primitive(r) if r else [])
    return Polynomial._raw(x, 1).monic()


def clear_denominators(p: Polynomial) -> Polynomial:
    """Integer multiple of p with content 1 and positive leading coefficient."""
    if not p:
        raise ZeroDivisorError("cannot normalise the zero polynomial")
    return p.primitive()[1]


def poly_powmod(base: Polynomial, e: int, mod: Polynomial) -> Polynomial:
    result = ONE % mod
    base = base % mod
    while e:
        if e & 1:
            result = (result * base) % mod
        e >>= 1
        if e:
            base = (base * base) % mod
    return result


def compose_mod(p: Polynomial, e: int, mod: Polynomial) -> Polynomial:
    """p(z**e) mod `mod`, reducing as it goes."""
    if len(p) <= 1:
        return p % mod
    if not mod:
        raise ZeroDivisorError()
    mnum = _primitive(mod.integer_parts()[0])
    if len(mnum) == 1:
        return ZERO
    W, wden = poly_powmod(Z, e, mod).integer_parts()
    pnum, pden = p.integer_parts()
    # Horner on integer numerators; acc = N / D, content removed every few steps
    N, D = [], 1
    for i, c in enumerate(reversed(pnum)):
        if N:
            _, N, s = _divrem_int(_mul(N, W), mnum)
            D *= wden * s
        if c:
            if not N:
                N = [0]
            N[0] += c * D
        if i % 16 == 15 and D > 1:
            g = D
            for x in N:
                if g == 1:
                    break
                if x:
                    g = math.gcd(g, x)
            if g > 1:
                N, D = [x // g for x in N], D // g
    return Polynomial._raw(N, D * pden)


def _charpoly(m: list) -> list:
    """Characteristic polynomial coefficients (lowest first) via Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # mk <- m*mk + c_{n-k+1} I
        prod = [[sum(m[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        mk = prod
        tr = sum(sum(m[i][t] * mk[t][i] for t in range(n)) for i in range(n))
        coeffs[n - k] = -tr / k
    return coeffs


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)] for i in range(n)]


def graeffe(p: Polynomial, d: int) -> Polynomial:
    """Monic polynomial whose roots are the d-th powers of the roots of p.

    Multiplicities are kept, so p(z) always divides graeffe(p, d)(z**d).
    """
    n = p.deg
    if n == MINUS_INFINITY:
        raise ZeroDivisorError("graeffe of zero")
    if n <= 0:
        return ONE
    c = p.monic().coeffs
    comp = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        comp[i][i - 1] = Fraction(1)
    for i in range(n):
        comp[i][n - 1] = -c[i]
    power = None
    base = comp
    e = d
    while e:
        if e & 1:
            power = base if power is None else _matmul(power, base)
        e >>= 1
        if e:
            base = _matmul(base, base)
    return Polynomial(_charpoly(power))
