"""Command line interface: curve data, flat sections, period maps, verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
Output is JSON; rationals are ``"p/q"`` strings.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

from .curve import Chart, CurveError, CurveParams, P_k, choose_f, e_value, pq_coeffs
from .formal import parse_q, qstr, value_to_json
from .kzb import adjoint_flat_section, build_kzb, compare_sections
from .period import CONVENTIONS, diff_results, period_map_oracle, period_map_rhs

SCHEMA = 1
SUITE_NAMES = (
    "curve", "pq", "gauge", "residue", "hodge", "universality", "bch", "flatad",
    "logarithm", "adaverage", "kernels", "theorem1", "theorem2", "determinism", "all",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: CurveParams
    chart: Chart | None
    depth: int
    order: int


def _params(args) -> CurveParams:
    try:
        return CurveParams(parse_q(args.e4), parse_q(args.e6))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def _config(args) -> RunConfig:
    params = _params(args)
    if args.depth < 2:
        raise ConfigError("--depth must be >= 2")
    if args.order < 1:
        raise ConfigError("--order must be >= 1")
    if args.tangential:
        chart = Chart.infinity(params)
    else:
        if not args.basepoint:
            raise ConfigError("give --basepoint x,y or --tangential")
        try:
            x0, y0 = (parse_q(t) for t in args.basepoint.split(","))
            chart = Chart.point(params, x0, y0)
        except CurveError as exc:
            raise ConfigError(str(exc)) from exc
        except ValueError as exc:
            raise ConfigError(f"cannot parse basepoint {args.basepoint!r}: {exc}") from exc
    return RunConfig(params, chart, args.depth, args.order)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps({"schema": SCHEMA, **payload, "conventions": CONVENTIONS}, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_curve_data(args) -> int:
    params = _params(args)
    K = args.max_k
    if K < 2:
        raise ConfigError("--max-k must be >= 2")
    p, q = pq_coeffs(params, K)
    payload = {
        "command": "curve-data",
        "curve": params.to_json(),
        "h": "4x^3 - 60 e4 x - 140 e6",
        "e": [{"k": k, "value": qstr(e_value(params, k))} for k in range(2, K + 1)],
        "P": [{"k": k, "value": str(P_k(params, k)), **P_k(params, k).to_json()} for k in range(1, K + 1)],
        "p": [{"n": n, "value": str(p[n])} for n in range(2, K + 1)],
        "q": [{"n": n, "value": str(q[n])} for n in range(1, K + 1)],
        "f": str(choose_f(params)),
    }
    _emit(payload, args.out)
    return 0


def _sections_json(sec: tuple[dict, dict], M: int) -> dict:
    Gs, G = sec

    def enc(v):
        return value_to_json(v.truncate(M)) if hasattr(v, "truncate") else value_to_json(v)

    return {
        "Gstar": [{"u": u, "v": v, "value": enc(Gs[(u, v)])} for (u, v) in sorted(Gs, key=lambda k: (sum(k), k))],
        "G": [{"r": r, "s": s, "value": enc(G[(r, s)])} for (r, s) in sorted(G, key=lambda k: (sum(k), k))],
    }


def cmd_flat_section(args) -> int:
    cfg = _config(args)
    data = build_kzb(cfg.params, cfg.depth)
    tang = cfg.chart.is_tangential
    payload = {"command": "flat-section", "curve": cfg.params.to_json(), "chart": cfg.chart.describe(), "depth": cfg.depth, "order": cfg.order}
    methods = {"closed": ["recursion"], "oracle": ["free"], "both": ["recursion", "free"]}[args.method]
    results = {}
    for m in methods:
        results[m] = adjoint_flat_section(data, cfg.chart, tang, cfg.order, cfg.depth, m)
        payload[m] = _sections_json(results[m], cfg.order)
    if len(results) == 2:
        payload["diff"] = [list(map(str, d)) for d in compare_sections(results["recursion"], results["free"], cfg.order)]
    _emit(payload, args.out)
    return 0


def cmd_period_map(args) -> int:
    cfg = _config(args)
    payload = {"command": "period-map", "curve": cfg.params.to_json(), "chart": cfg.chart.describe()}
    res = {}
    if args.method in ("closed", "both"):
        res["closed"] = period_map_rhs(cfg.params, cfg.chart, cfg.depth, cfg.order)
    if args.method in ("oracle", "both"):
        res["oracle"] = period_map_oracle(cfg.params, cfg.chart, cfg.depth, cfg.order)
    payload["results"] = [r.to_json() for r in res.values()]
    if len(res) == 2:
        payload["diff"] = diff_results(res["closed"], res["oracle"])
    _emit(payload, args.out)
    return 0


def cmd_verify(args) -> int:
    from .suites import run_suite

    cases = run_suite(args.suite, args.seed)
    lines = [json.dumps(c.to_json(), sort_keys=True) for c in cases]
    ok = all(c.ok for c in cases)
    lines.append(json.dumps({"schema": SCHEMA, "suite": args.suite, "seed": args.seed, "passed": sum(c.ok for c in cases), "total": len(cases), "ok": ok}, sort_keys=True))
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kzbperiod", description="Metabelian de Rham period map of a punctured elliptic curve.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def curve_flags(p):
        p.add_argument("--e4", default="1", help="rational, e.g. 1 or -3/4")
        p.add_argument("--e6", default="0")
        p.add_argument("--out", help="write JSON here instead of stdout")

    def chart_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--basepoint", help="rational point x,y on the curve with y != 0")
        g.add_argument("--tangential", action="store_true", help="tangential basepoint d/dz at infinity")
        p.add_argument("--depth", type=int, default=4)
        p.add_argument("--order", type=int, default=10)
        p.add_argument("--method", choices=("closed", "oracle", "both"), default="both")

    p = sub.add_parser("curve-data", help="e_k, P_k, p_n, q_n and f")
    curve_flags(p)
    p.add_argument("--max-k", type=int, default=6)
    p.set_defaults(func=cmd_curve_data)

    p = sub.add_parser("flat-section", help="coefficients of the adjoint flat section")
    curve_flags(p)
    chart_flags(p)
    p.set_defaults(func=cmd_flat_section)

    p = sub.add_parser("period-map", help="period map by closed form and/or free-algebra oracle")
    curve_flags(p)
    chart_flags(p)
    p.set_defaults(func=cmd_period_map)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return ap


_VALUE_FLAGS = ("--e4", "--e6", "--basepoint")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse takes "-5/7" or "-4,2" for an option; attach such values to their flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt[:1] == "-" and nxt[1:2].isdigit():
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CurveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
