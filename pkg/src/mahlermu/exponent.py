"""The irrationality exponent mu(f(b)) from primitive gap sequences.

mu(f(b)) = 1 + limsup d_{k+1}/d_k, and the limsup is attained along the
successor chains of primitive gaps.  Only primitive gaps with u up to the
search horizon can matter.  Along a chain, r_g is watched for a period; once
one is found the limit of v_n/u_n has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .algebra import format_rational
from .cfrac import cf_expand, certified_degrees
from .config import RunConfig
from .errors import DegenerateOrbit, HorizonTooSmall, LowerBoundUndefined, SeriesAppearsRational
from .gaps import (
    Gap,
    PrimitiveSequence,
    classify,
    contribution_bounds,
    enumerate_gaps,
    horizon_S,
    is_big,
    iterate_primitive,
    search_horizon,
)
from .series import LaurentSeries, MahlerEquation

EXACT = "exact"
ENCLOSURE = "enclosure"
CONJECTURAL = "conjectural"


def _fmt(x) -> str:
    return format_rational(Fraction(x))


@dataclass
class ExponentResult:
    kind: str
    value: object  # Fraction, or (lo, hi) for an enclosure
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == ENCLOSURE:
            lo, hi = self.value
            assert 2 <= lo <= hi, self.value
        else:
            assert self.value >= 2, self.value

    @property
    def lo(self) -> Fraction:
        return self.value[0] if self.kind == ENCLOSURE else self.value

    @property
    def hi(self) -> Fraction:
        return self.value[1] if self.kind == ENCLOSURE else self.value

    def to_json(self) -> dict:
        if self.kind == ENCLOSURE:
            mu = {"lo": _fmt(self.value[0]), "hi": _fmt(self.value[1])}
        else:
            mu = _fmt(self.value)
        return {"kind": self.kind, "mu": mu, "certificate": self.certificate}


def detect_period(r_g, window: int) -> Optional[Tuple[int, int]]:
    """Smallest (n0, P) with r_g periodic of period P from n0 to the end of the data.

    At least `window` comparisons must back the period and n0 + 2*window
    cannot exceed the data length.
    """
    seq = list(r_g)
    n = len(seq)
    for n0 in range(0, n - 2 * window + 1):
        for P in range(1, n - n0 - window + 1):
            if all(seq[i] == seq[i + P] for i in range(n0, n - P)):
                return n0, P
    return None


def period_confirmed(length: int, n0: int, P: int, window: int) -> bool:
    """True when the data show `window` full repeats after the first period."""
    return length - n0 >= (window + 1) * P


def periodic_limit(u0: int, v0: int, r_g_window, eq: MahlerEquation) -> Fraction:
    """Limit of v_n/u_n when r_g repeats `r_g_window` from the state (u0, v0)."""
    d, ra, rb = eq.d, eq.r_a, eq.r_b
    P = len(r_g_window)
    if P == 0:
        raise ValueError("empty period")
    dP = d ** P
    geo = (dP - 1) // (d - 1)
    weighted = sum(d ** (P - 1 - k) * g for k, g in enumerate(r_g_window))
    r_u = rb * geo - weighted
    r_v = ra * geo - weighted
    den = u0 * (dP - 1) + r_u
    if den == 0:
        raise DegenerateOrbit()
    return Fraction(v0 * (dP - 1) - r_v, den)


def iterate_orbit(u0: int, v0: int, r_g_window, eq: MahlerEquation, supersteps: int):
    """(u, v) after `supersteps` passes through the periodic block."""
    d, ra, rb = eq.d, eq.r_a, eq.r_b
    u, v = u0, v0
    for _ in range(supersteps):
        for g in r_g_window:
            u, v = d * u + rb - g, d * v - ra + g
    return u, v


@dataclass
class Admissibility:
    ok: bool
    failing_t: Optional[int]
    tested_t: int  # number of t values that needed an explicit test

    def to_json(self) -> dict:
        return {"ok": self.ok, "failing_t": self.failing_t, "tested_t": self.tested_t}


def _root_bound(eq: MahlerEquation) -> Fraction:
    P = eq.A * eq.B
    lead = abs(P.leading)
    return 1 + max((abs(c) / lead for c in P.coeffs[:-1]), default=Fraction(0))


def check_b_admissible(eq: MahlerEquation, b: int) -> Admissibility:
    """Whether A(b^(d^t)) B(b^(d^t)) != 0 for every t >= 0."""
    if abs(b) < 2:
        raise ValueError("|b| must be >= 2")
    bound = _root_bound(eq)
    t = 0
    x = b
    while abs(x) <= bound:
        if eq.A(x) == 0 or eq.B(x) == 0:
            return Admissibility(False, t, t + 1)
        t += 1
        x = x ** eq.d
    return Admissibility(True, None, t)


def growth_radius(series: LaurentSeries, tail: int = 32) -> float:
    """Heuristic radius: max |f_k|^(1/k) over the last `tail` known coefficients."""
    coeffs = series.coeffs
    best = 0.0
    for i in range(max(1, len(coeffs) - tail), len(coeffs)):
        c = coeffs[i]
        if c:
            lg = math.log(abs(c.numerator)) - math.log(c.denominator)
            best = max(best, math.exp(lg / i))
    return best


def _sequence_entry(rec, seq: PrimitiveSequence, eq: MahlerEquation, window: int):
    r_g = seq.r_g
    entry = {
        "start": rec.gap.as_list(),
        "steps": len(seq.steps) - 1,
        "trail": [[s.u, s.v] for s in seq.steps],
        "r_g": r_g,
    }
    if seq.note:
        entry["note"] = seq.note
    if seq.modular_from is not None:
        entry["modular_from"] = seq.modular_from
    found = detect_period(r_g, window)
    confirmed = False
    limit = None
    if found:
        n0, P = found
        confirmed = period_confirmed(len(r_g), n0, P, window)
        entry["period"] = {"n0": n0, "P": P, "confirmed": confirmed}
        block = r_g[n0:n0 + P]
        limits = []
        for phase in range(P):
            s = seq.steps[n0 + phase]
            limits.append(periodic_limit(s.u, s.v, block[phase:] + block[:phase], eq))
        limit = max(limits)
    else:
        entry["period"] = None
    last = seq.steps[len(r_g) - 1] if r_g else seq.steps[0]
    lo, hi = contribution_bounds(Gap(last.u, last.v), eq)
    entry["bounds"] = {"lo": _fmt(lo), "hi": _fmt(hi) if hi is not None else None}
    if confirmed:
        entry["limit"] = _fmt(limit)
    return entry, confirmed, limit, lo, hi


def compute_mu(eq: MahlerEquation, series: LaurentSeries, b: int,
               config: Optional[RunConfig] = None, rationality=None) -> ExponentResult:
    """mu(f(b)) with a certificate; see the module docstring for the method.

    `rationality` maps (eq, series, sequences) to an object with a `verdict`
    attribute; by default the rationality module is used.
    """
    config = config or RunConfig()
    d = eq.d
    ra1, rb1 = Fraction(eq.r_a, d - 1), Fraction(eq.r_b, d - 1)
    S = horizon_S(eq)
    H = config.horizon
    adm = check_b_admissible(eq, b)
    cert = {
        "b": b,
        "admissibility": adm.to_json(),
        "horizon": H,
        "irrationality_assumed": True,
        "warnings": [],
    }
    if not adm.ok:
        cert["warnings"].append("hypotheses unverified: A(b^(d^t)) B(b^(d^t)) vanishes")

    # cheap scan: steps that could hide a big gap
    degs = certified_degrees(series, H)
    threshold = eq.r_a + eq.r_b
    flagged = [i for i in range(len(degs) - 1)
               if degs[i] <= H and (degs[i + 1] - degs[i]) * (d - 1) > threshold]
    radius = growth_radius(series)
    cert["growth_radius_estimate"] = round(radius, 6)
    if radius >= abs(b):
        cert["warnings"].append("b may lie outside the disc of convergence")

    records = []
    if flagged:
        target = degs[flagged[0] + 1]
        cf = cf_expand(series, target)
        if cf.terminated:
            raise SeriesAppearsRational()
        records = enumerate_gaps(cf, target - 1)
    big = [r for r in records if is_big(r.gap, eq)]
    if not big:
        hi = 1 + (H + S + rb1) / (H - ra1) if H * (d - 1) > eq.r_a else None
        cert["big_gaps"] = "none found up to horizon"
        cert["max_step"] = max(degs[i + 1] - degs[i] for i in range(len(degs) - 1))
        if hi is None:
            raise HorizonTooSmall("horizon too small for an enclosure")
        return ExponentResult(ENCLOSURE, (Fraction(2), max(hi, Fraction(2))), cert)

    first = big[0].gap
    anchor = None
    for r in big:
        try:
            lower, _ = contribution_bounds(r.gap, eq)
        except LowerBoundUndefined:
            continue
        anchor = r.gap
        break
    cert["first_big_gap"] = first.as_list()
    u_max = None
    if anchor is not None:
        cert["anchor"] = anchor.as_list()
        if anchor.u == 0:
            cert["anchor_note"] = "anchor has u = 0; lower bound defined since r_b != 0"
        if lower > 1:
            u_max = search_horizon(anchor, eq)
    cert["u_max"] = u_max
    scan_limit = H if u_max is None else min(max(u_max, first.u), H)
    incomplete = u_max is None or u_max > H
    cert["scan_limit"] = scan_limit

    cf = cf_expand(series, scan_limit + 1)
    records = classify(enumerate_gaps(cf, scan_limit), eq)
    cert["gaps"] = [{"u": r.gap.u, "v": r.gap.v, "big": r.big, "primitive": r.primitive}
                    for r in records]
    contributors = [r for r in records if r.primitive]
    sequences = []
    entries = []
    all_confirmed = True
    exact_vals, lows, highs = [], [], []
    for rec in contributors:
        seq = iterate_primitive(rec, eq, config.primitive_steps)
        sequences.append(seq)
        entry, confirmed, limit, lo, hi = _sequence_entry(rec, seq, eq, config.period_window)
        entries.append(entry)
        for row in cert["gaps"]:
            if row["u"] == rec.gap.u:
                row["r_g_sequence"] = seq.r_g
        if confirmed:
            exact_vals.append(limit)
            lows.append(limit)
            highs.append(limit)
        else:
            all_confirmed = False
            lows.append(lo)
            highs.append(hi)
    cert["sequences"] = entries

    if incomplete:
        all_confirmed = False
        u = H + 1
        tail_hi = (u + S + rb1) / (u - ra1) if u * (d - 1) > eq.r_a else None
        highs.append(tail_hi)
        cert["warnings"].append("search horizon exceeds the scan limit; primitive gaps beyond it bounded only")

    if all_confirmed:
        if rationality is None:
            from .rationality import rationality_verdict
            rationality = rationality_verdict
        report = rationality(eq, series, sequences)
        verdict = report.verdict
        cert["rationality"] = verdict
        cert["period_confirmation"] = "empirical"
        value = 1 + max(exact_vals)
        kind = EXACT if verdict in ("certified-rational", "conditions-met") else CONJECTURAL
        return ExponentResult(kind, max(value, Fraction(2)), cert)

    lo = max(Fraction(2), 1 + max(lows))
    if any(h is None for h in highs):
        raise HorizonTooSmall("no finite upper bound available; increase the horizon or steps")
    hi = max(lo, 1 + max(highs))
    return ExponentResult(ENCLOSURE, (lo, hi), cert)
