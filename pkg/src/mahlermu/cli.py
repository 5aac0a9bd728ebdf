"""Command-line interface: mahlermu <command> FILE [options]."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional

import mpmath

from .algebra import format_rational, to_rational
from .cfrac import cf_expand
from .config import RunConfig
from .errors import MahlerError, ParseError
from .exponent import ENCLOSURE, check_b_admissible, compute_mu
from .gaps import classify, enumerate_gaps, iterate_primitive
from .numeric import build_approx, empirical_exponent, eval_f, records_to_rows, write_csv
from .rationality import rationality_verdict
from .series import expand_any, infer_degree, load_equation

SCHEMA = 1
EXIT_OK, EXIT_PARSE, EXIT_INADMISSIBLE, EXIT_PIPELINE = 0, 2, 3, 4


class InadmissibleB(Exception):
    def __init__(self, payload):
        self.payload = payload


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _parse_seeds(items: Optional[List[str]]) -> Dict[int, Fraction]:
    seeds = {}
    for item in items or []:
        if "=" not in item:
            raise ParseError(f"--seed expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        try:
            key = int(k)
        except ValueError:
            raise ParseError(f"--seed position must be an integer, got {k!r}") from None
        seeds[key] = to_rational(v)
    return seeds


def _load(args):
    ef = load_equation(args.file)
    seeds = dict(ef.seeds)
    seeds.update(_parse_seeds(args.seed))
    return ef, seeds


def _series(args, n: int = 64):
    ef, seeds = _load(args)
    return ef, expand_any(ef.equation, n, seeds, ef.K)


def _config(args) -> RunConfig:
    return RunConfig(horizon=args.horizon, primitive_steps=args.steps, period_window=args.window,
                     digits=args.digits, b_values=args.b or [2], emit=args.emit)


def _require_admissible(eq, b):
    adm = check_b_admissible(eq, b)
    if not adm.ok:
        raise InadmissibleB({"schema": SCHEMA, "b": b, "error": "inadmissible b",
                             "admissibility": adm.to_json()})


def cmd_expand(args) -> dict:
    ef, seeds = _load(args)
    s = expand_any(ef.equation, args.n, seeds, ef.K)
    return {
        "schema": SCHEMA,
        "K_candidates": infer_degree(ef.equation),
        "K": s.K,
        "coefficients": [format_rational(c) for c in s.coeffs[:args.n]],
    }


def cmd_cf(args) -> dict:
    _, s = _series(args)
    cf = cf_expand(s, args.degree)
    convs = cf.convergents
    return {
        "schema": SCHEMA,
        "degrees": list(cf.degrees),
        "certified_count": cf.certified_count,
        "terminated": cf.terminated,
        "quotients": [q.to_text() for q in cf.quotients],
        "convergents": [{"k": c.k, "p": c.p.to_text(), "q": c.q.to_text()} for c in convs],
    }


def _gap_rows(eq, s, horizon: int, steps: int):
    cf = cf_expand(s, horizon + 1)
    recs = classify(enumerate_gaps(cf, horizon), eq)
    rows = []
    for r in recs:
        row = {"u": r.gap.u, "v": r.gap.v, "big": r.big, "primitive": r.primitive}
        if r.primitive:
            row["r_g_sequence"] = iterate_primitive(r, eq, steps).r_g
        rows.append(row)
    return cf, rows


def cmd_gaps(args) -> dict:
    ef, s = _series(args)
    cfg = _config(args)
    _, rows = _gap_rows(ef.equation, s, cfg.horizon, cfg.primitive_steps)
    return {"schema": SCHEMA, "horizon": cfg.horizon, "gaps": rows}


def _mu_one(ef, s, b, cfg):
    _require_admissible(ef.equation, b)
    res = compute_mu(ef.equation, s, b, cfg)
    out = {"schema": SCHEMA}
    out.update(res.to_json())
    return res, out


def cmd_mu(args) -> dict:
    ef, s = _series(args)
    cfg = _config(args)
    outs = []
    for b in cfg.b_values:
        res, out = _mu_one(ef, s, b, cfg)
        outs.append(out)
        if cfg.emit:
            os.makedirs(cfg.emit, exist_ok=True)
            _write_gap_csv(out["certificate"], os.path.join(cfg.emit, f"gaps_b{b}.csv"))
    if len(outs) == 1:
        return outs[0]
    return {"schema": SCHEMA, "results": outs}


def cmd_eval(args) -> dict:
    ef, s = _series(args)
    cfg = _config(args)
    results = []
    for b in cfg.b_values:
        _require_admissible(ef.equation, b)
        ev = eval_f(s, b, cfg.digits)
        with mpmath.workdps(cfg.digits + 20):
            text = mpmath.nstr(ev.value, cfg.digits)
        results.append({"b": b, "value": text, "terms": ev.terms, "digits": cfg.digits,
                        "tail_bound_heuristic": ev.heuristic})
    if len(results) == 1:
        return {"schema": SCHEMA, **results[0]}
    return {"schema": SCHEMA, "results": results}


def cmd_check_rationality(args) -> dict:
    ef, s = _series(args)
    report = rationality_verdict(ef.equation, s, digits=min(args.digits, 80))
    return {"schema": SCHEMA, "rationality": report.to_json()}


def _write_gap_csv(cert, path):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v", "big", "primitive"])
        for row in cert.get("gaps", []):
            w.writerow([row["u"], row["v"], int(row["big"]), int(row["primitive"])])


def _experiment(eq, s, cf, big_rows, b, digits):
    """Approximation records for the first two big-gap convergents."""
    fb = eval_f(s, b, digits)
    picks = [r for r in big_rows if r["big"]][:2]
    if not picks:
        picks = [{"u": d, "v": cf.degrees[i + 1]} for i, d in enumerate(cf.degrees[:-1]) if d >= 1][:2]
    records = []
    d = eq.d
    rb1 = Fraction(eq.r_b, d - 1)
    for row in picks:
        c = cf.convergent_of_degree(row["u"])
        size = (row["u"] + row["v"] + rb1) * math.log10(abs(b))
        for m in range(1, 7):
            if d ** m * size > 0.9 * digits:
                break
            records.append(build_approx(c, eq, b, m, fb))
    return records


def cmd_report(args) -> dict:
    ef, s = _series(args)
    cfg = _config(args)
    eq = ef.equation
    out = {"schema": SCHEMA, "equation": eq.to_json(), "results": []}
    emit = cfg.emit
    if emit:
        os.makedirs(emit, exist_ok=True)
    for b in cfg.b_values:
        res, mu_json = _mu_one(ef, s, b, cfg)
        cert = mu_json["certificate"]
        scan = cert.get("scan_limit") or 8
        cf = cf_expand(s, max(scan, 8) + 1)
        records = _experiment(eq, s, cf, cert.get("gaps", []), b, cfg.digits)
        rows = records_to_rows(records)
        entry = {"b": b, "mu": mu_json, "approximations": rows}
        if records:
            with mpmath.workdps(30):
                entry["empirical_exponent"] = mpmath.nstr(empirical_exponent(records), 12)
        out["results"].append(entry)
        if emit:
            from . import plotting

            write_csv(records, os.path.join(emit, f"approximations_b{b}.csv"))
            _write_gap_csv(cert, os.path.join(emit, f"gaps_b{b}.csv"))
            lo, hi = res.lo, res.hi
            plotting.plot_convergence(rows, lo, hi, os.path.join(emit, f"convergence_b{b}.png"))
            plotting.plot_gap_trail(cert.get("sequences", []), os.path.join(emit, f"gap_trail_b{b}.png"))
            plotting.plot_degrees(list(cf.degrees), os.path.join(emit, f"degree_ratios_b{b}.png"))
    out["rationality"] = rationality_verdict(eq, s, digits=min(cfg.digits, 80)).to_json()
    return out


COMMANDS = {
    "expand": cmd_expand,
    "cf": cmd_cf,
    "gaps": cmd_gaps,
    "mu": cmd_mu,
    "eval": cmd_eval,
    "check-rationality": cmd_check_rationality,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="equation JSON file")
    common.add_argument("--horizon", type=int, default=200)
    common.add_argument("--steps", type=int, default=24, help="primitive sequence steps")
    common.add_argument("--window", type=int, default=8, help="period confirmation window")
    common.add_argument("--digits", type=int, default=5000)
    common.add_argument("--b", type=int, action="append", help="evaluation point (repeatable)")
    common.add_argument("--emit", help="directory for CSV and PNG output")
    common.add_argument("--seed", action="append", metavar="k=v", help="value of a free coefficient f_k")
    parser = argparse.ArgumentParser(prog="mahlermu", description="Irrationality exponents of Mahler numbers.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("expand", parents=[common], help="Laurent expansion of f")
    p.add_argument("-n", type=int, default=16, help="number of coefficients")
    p = sub.add_parser("cf", parents=[common], help="continued fraction of f")
    p.add_argument("--degree", type=int, default=20, help="certify convergents up to this degree")
    for name, text in (("gaps", "gaps of Phi(f)"), ("mu", "irrationality exponent of f(b)"),
                       ("eval", "value of f(b)"), ("check-rationality", "rationality analysis"),
                       ("report", "full report with CSV and figures")):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        result = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InadmissibleB as exc:
        print(_dump(exc.payload))
        print("error: inadmissible b", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except MahlerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(_dump(result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
