"""Command line entry point: ``radgaps <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 guard refusal.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from . import svg
from .closed_form import closed_form, oracle_unreduced_gap
from .core import DomainError, GuardError, parse_rational
from .engine import (
    QUOTED_THRESHOLDS_ALPHA3,
    SequenceSpec,
    background_scan,
    convergence_series,
    gap_profile,
    min_N_estimate,
    outlier_residual,
)
from .orchard import Linear, OrchardScene, Parabolic, compare_to_closed_form, illumination_pattern

COLUMNS = ["x_num", "x_den", "N", "raw_gap", "scaled_gap", "closed_form_num", "closed_form_den", "rel_err"]
EXIT_USAGE, EXIT_DOMAIN, EXIT_GUARD = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(v, digits: int) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and v != v:
        return "nan"
    return mpmath.nstr(mpmath.mpf(v), digits, strip_zeros=False, min_fixed=-4, max_fixed=6)


def _limit(x: Fraction, spec: SequenceSpec) -> Optional[Fraction]:
    try:
        return closed_form(x, spec.alpha, spec.a, spec.b).value
    except DomainError:
        return None


def _row(x: Fraction, N: int, raw, scaled, limit: Optional[Fraction], digits: int) -> dict:
    rel = None if limit is None else abs(float(scaled) - float(limit)) / float(limit)
    return {
        "x_num": x.numerator,
        "x_den": x.denominator,
        "N": N,
        "raw_gap": _num(raw, digits),
        "scaled_gap": _num(scaled, digits),
        "closed_form_num": "" if limit is None else limit.numerator,
        "closed_form_den": "" if limit is None else limit.denominator,
        "rel_err": _num(rel, digits),
    }


def _emit_rows(rows: list[dict], fmt: str, columns=COLUMNS) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _spec(args) -> SequenceSpec:
    return SequenceSpec(N=args.n, alpha=args.alpha, a=args.a, b=args.b)


def _profile_svg(points, spec: SequenceSpec, title: str) -> str:
    limits = [(x, _limit(x, spec)) for x, _ in points]
    top = max([float(s.scaled_width) for _, s in points] + [float(v) for _, v in limits if v is not None])
    plot = svg.Plot((0, 1), (0, min(top * 1.05, 6.0)), title=title, x_label="x", y_label="scaled gap")
    svg.guides(plot)
    for x, s in points:
        plot.stem(float(x), float(s.scaled_width))
    for x, v in limits:
        if v is not None:
            plot.dot(float(x), float(v))
    return plot.render()


def cmd_closed_form(args) -> str:
    x = parse_rational(args.x)
    v = closed_form(x, args.alpha, args.a, args.b)
    if args.format == "text":
        return f"{v.value}\t{v.formula_path}\td={v.d}\tgap_factor={v.gap_factor}\n"
    row = {
        "x_num": x.numerator,
        "x_den": x.denominator,
        "alpha": args.alpha,
        "a": args.a,
        "b": args.b,
        "value_num": v.value.numerator,
        "value_den": v.value.denominator,
        "d": v.d,
        "gap_factor": v.gap_factor,
        "formula_path": v.formula_path,
    }
    return _emit_rows([row], args.format, list(row))


def cmd_oracle(args) -> str:
    x = parse_rational(args.x)
    v = oracle_unreduced_gap(x, args.alpha, args.a, args.b)
    if args.format == "text":
        return f"{v}\n"
    row = {"x_num": x.numerator, "x_den": x.denominator, "alpha": args.alpha, "a": args.a, "b": args.b,
           "value_num": v.numerator, "value_den": v.denominator}
    return _emit_rows([row], args.format, list(row))


def cmd_profile(args) -> str:
    spec = _spec(args)
    points = gap_profile(spec, args.max_q, workers=args.threads)
    if args.format == "svg":
        return _profile_svg(points, spec, f"alpha={spec.alpha} a={spec.a} b={spec.b} N={spec.N}")
    rows = [_row(x, spec.N, s.measurement.width, s.scaled_width, _limit(x, spec), args.precision) for x, s in points]
    return _emit_rows(rows, args.format)


def cmd_converge(args) -> str:
    x = parse_rational(args.x)
    schedule = [int(v) for v in args.n.split(",")]
    template = SequenceSpec(N=schedule[0], alpha=args.alpha, a=args.a, b=args.b)
    series = convergence_series(template, x, schedule, workers=args.threads)
    limit = _limit(x, template)
    if args.format == "svg":
        ys = [float(s.scaled_width) for s in series]
        hi = max(ys + ([float(limit)] if limit is not None else []))
        plot = svg.Plot((schedule[0], schedule[-1]), (0, hi * 1.1), title=f"x={x}", x_label="N",
                        y_label="scaled gap", log_x=len(schedule) > 1 and schedule[0] > 0)
        if limit is not None:
            plot.line(schedule[0], float(limit), schedule[-1], float(limit), color="#d62728", dash="4,3")
        plot.polyline(schedule, ys)
        for n, y in zip(schedule, ys):
            plot.dot(n, y, color="#1f77b4")
        return plot.render()
    rows = [_row(x, s.measurement.N, s.measurement.width, s.scaled_width, limit, args.precision) for s in series]
    return _emit_rows(rows, args.format)


def _coef(text: str):
    try:
        return parse_rational(text)
    except DomainError:
        return float(text)


def cmd_orchard(args) -> str:
    if args.intercept == "parabolic":
        ic = Parabolic()
    else:
        ic = Linear(_coef(args.c1), _coef(args.c2))
    scene = OrchardScene(args.k_max, ic, a=args.a, b=args.b)
    rows_cf = compare_to_closed_form(scene, args.max_q)
    if args.format == "svg":
        pattern = illumination_pattern(scene)
        top = max([r.scaled_length for r in rows_cf if r.scaled_length == r.scaled_length] + [float(r.closed_form) for r in rows_cf])
        plot = svg.Plot((0, 1), (0, min(top * 1.05, 6.0)), title=f"orchard k_max={args.k_max} ({args.intercept})",
                        x_label="x", y_label="scaled lit length")
        svg.guides(plot)
        scaled = pattern.scaled_length
        mids = pattern.x_mid
        # only segments visibly above the background, to keep the file small
        cut = 10.0 / args.k_max
        for xm, s in zip(mids[scaled > cut], scaled[scaled > cut]):
            plot.stem(float(xm), float(s))
        for r in rows_cf:
            plot.dot(float(r.x), float(r.closed_form))
        return plot.render()
    N = scene.equivalent_n
    rows = []
    for r in rows_cf:
        rows.append(_row(r.x, N, r.raw_length, r.scaled_length, r.closed_form, args.precision))
    return _emit_rows(rows, args.format)


def cmd_histogram(args) -> str:
    spec = _spec(args)
    h = background_scan(spec, sample_budget=args.budget, mode=args.mode, nbins=args.bins)
    if args.format == "svg":
        plot = svg.Plot((h.edges[0], h.edges[-1]), (0.5, max(h.counts.max(), 1) * 2), title=f"background gaps N={spec.N}",
                        x_label="scaled gap", y_label="count", log_x=True, log_y=True)
        for lo, hi, c in zip(h.edges[:-1], h.edges[1:], h.counts):
            if c > 0:
                plot.bar(lo, hi, c)
        return plot.render()
    rows = [{"bin_lo": _num(lo, args.precision), "bin_hi": _num(hi, args.precision), "count": int(c)}
            for lo, hi, c in zip(h.edges[:-1], h.edges[1:], h.counts)]
    summary = {
        "mode": h.mode,
        "count": h.count,
        "mean_raw": _num(h.mean_raw, args.precision),
        "median_raw": _num(h.median_raw, args.precision),
        "mean_scaled": _num(h.mean_scaled, args.precision),
        "median_scaled": _num(h.median_scaled, args.precision),
        "tail_exponent": _num(h.tail_exponent, args.precision),
        "exp_rate": _num(h.exp_rate, args.precision),
    }
    if args.format == "json":
        return json.dumps({"summary": summary, "bins": rows}, indent=1) + "\n"
    return _emit_rows(rows, "csv", ["bin_lo", "bin_hi", "count"])


def cmd_estimate_n(args) -> str:
    n = min_N_estimate(args.eps, args.alpha)
    out = {"eps": args.eps, "alpha": args.alpha, "N": n, "residual": outlier_residual(n, args.eps, args.alpha)}
    if args.format == "json":
        out["quoted_thresholds"] = QUOTED_THRESHOLDS_ALPHA3
        return json.dumps(out, indent=1) + "\n"
    lines = [f"N = {n:.6g} (residual {out['residual']:.2e})"]
    if args.alpha == 3:
        lines += [f"  quoted for context: {k} ~ {v:.0e}" for k, v in QUOTED_THRESHOLDS_ALPHA3.items()]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radgaps", description="Gaps around rationals in fractional parts of radicals.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def seq_flags(p, need_n=True):
        p.add_argument("--alpha", type=int, default=2)
        p.add_argument("--a", type=int, default=1)
        p.add_argument("--b", type=int, default=0)
        if need_n:
            p.add_argument("--n", type=int, required=True)

    def out_flags(p, formats):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--output", "-o")
        p.add_argument("--precision", type=int, default=17, help="significant digits in numeric output")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("closed-form", help="exact gap limit at a rational")
    seq_flags(p, need_n=False)
    p.add_argument("--x", required=True)
    out_flags(p, ["text", "json", "csv"])
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("oracle", help="brute-force limit from the unreduced residue set")
    seq_flags(p, need_n=False)
    p.add_argument("--x", required=True)
    out_flags(p, ["text", "json", "csv"])
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("profile", help="scaled gaps at all Farey points")
    seq_flags(p)
    p.add_argument("--max-q", type=int, default=8)
    out_flags(p, ["csv", "json", "svg"])
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("converge", help="scaled gap at one point across an N schedule")
    seq_flags(p, need_n=False)
    p.add_argument("--x", required=True)
    p.add_argument("--n", required=True, help="comma separated ascending N values")
    out_flags(p, ["csv", "json", "svg"])
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("orchard", help="lit segments of the lattice shadow screen")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--intercept", choices=["parabolic", "linear"], default="parabolic")
    p.add_argument("--c1", default="0")
    p.add_argument("--c2", default="0")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--max-q", type=int, default=6)
    out_flags(p, ["csv", "json", "svg"])
    p.set_defaults(func=cmd_orchard)

    p = sub.add_parser("histogram", help="background gap distribution")
    seq_flags(p)
    p.add_argument("--mode", choices=["auto", "full", "sample"], default="auto")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--bins", type=int, default=40)
    out_flags(p, ["csv", "json", "svg"])
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("estimate-n", help="N beyond which background outliers stay below eps")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha", type=int, default=3)
    out_flags(p, ["text", "json"])
    p.set_defaults(func=cmd_estimate_n)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except GuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (DomainError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
