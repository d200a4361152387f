"""Command-line front end.

Exit codes: 0 ok, 1 parse or usage error, 2 invalid function, 3 oracle
comparison failure, 4 degenerate gauge.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import piecewise
from .gauge import DegenerateRay, Gauge2D, InvalidGauge, SmoothedGauge, unit_circle, unit_circle_angles
from .oracle import OracleSettings, prox_oracle_1d
from .piecewise import InvalidFunction, SpecParseError
from .plotting import envelope_table, rlabel, svg_chart, to_csv
from .prox import BadParam, ProxConfig, partition, prox

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_COMPARE, EXIT_DEGENERATE = 0, 1, 2, 3, 4

PROX_TOL = 1e-7
ENVELOPE_RTOL = 1e-9


# Names available to --expr besides x and y.
EXPR_NAMES = {
    "__builtins__": {},
    "np": np,
    "abs": np.abs,
    "sqrt": np.sqrt,
    "hypot": np.hypot,
    "maximum": np.maximum,
    "minimum": np.minimum,
}


class UsageError(Exception):
    pass


def _streams(out, err):
    return out or sys.stdout, err or sys.stderr


def _load(path, err):
    """Return ``(function, exit_code)``; the function is None on failure."""
    err = err or sys.stderr
    try:
        return piecewise.load(path), EXIT_OK
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=err)
        return None, EXIT_PARSE
    except OSError as exc:
        print(f"cannot read {path}: {exc.strerror or exc}", file=err)
        return None, EXIT_PARSE
    except InvalidFunction as exc:
        print(str(exc), file=err)
        return None, EXIT_INVALID


def cmd_validate(path, out=None, err=None):
    out, err = _streams(out, err)
    try:
        f = piecewise.load(path)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=out)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read {path}: {exc.strerror or exc}", file=out)
        return EXIT_PARSE
    except InvalidFunction as exc:
        print(str(exc), file=out)
        return EXIT_INVALID
    print(f"valid ({f.m} piece{'s' if f.m != 1 else ''})", file=out)
    return EXIT_OK


def cmd_eval(path, r, x, out=None, err=None):
    out, err = _streams(out, err)
    f, code = _load(path, err)
    if f is None:
        return code
    res = prox(f, ProxConfig(r), x)
    print(
        f"prox={res.prox:.12g} envelope={res.envelope:.12g} "
        f"gradient={res.gradient:.12g} cell={res.cell}",
        file=out,
    )
    return EXIT_OK


def cmd_partition(path, r, out=None, err=None):
    out, err = _streams(out, err)
    f, code = _load(path, err)
    if f is None:
        return code
    print(partition(f, ProxConfig(r)).render(), file=out)
    return EXIT_OK


def compare_range(part):
    b = part.boundaries
    if not b:
        return -3.0, 3.0
    lo, hi = min(b), max(b)
    w = hi - lo if hi > lo else 1.0
    return lo - 3 * w, hi + 3 * w


def cmd_compare(path, r, n_samples, seed=0, out=None, err=None, prox_fn=prox):
    """Sample prox-centres and compare ``prox_fn`` with the bisection oracle."""
    out, err = _streams(out, err)
    f, code = _load(path, err)
    if f is None:
        return code
    cfg = ProxConfig(r)
    lo, hi = compare_range(partition(f, cfg))
    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo, hi, size=int(n_samples))
    worst_p = worst_e = 0.0
    for x in xs:
        res = prox_fn(f, cfg, float(x))
        p, e = prox_oracle_1d(f, cfg, float(x), OracleSettings())
        worst_p = max(worst_p, abs(res.prox - p))
        worst_e = max(worst_e, abs(res.envelope - e) / (1.0 + abs(e)))
    ok = worst_p <= PROX_TOL and worst_e <= ENVELOPE_RTOL
    print(f"samples={len(xs)} range=[{lo:.12g},{hi:.12g}] seed={seed}", file=out)
    print(f"max_prox_error={worst_p:.3e} max_envelope_error={worst_e:.3e}", file=out)
    print("ok" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_COMPARE


def cmd_plot(path, r_values, lo, hi, samples, output, fmt_="csv", err=None):
    f, code = _load(path, err)
    if f is None:
        return code
    if not lo < hi:
        raise UsageError("range needs LO < HI")
    if samples < 2:
        raise UsageError("samples must be >= 2")
    header, rows = envelope_table(f, r_values, lo, hi, samples)
    if fmt_ == "csv":
        text = to_csv(header, rows)
    else:
        xs = [row[0] for row in rows]
        series = [("f", xs, [row[1] for row in rows])]
        for j, r in enumerate(r_values):
            series.append((f"e_rf(r={rlabel(r)})", xs, [row[2 + j] for row in rows]))
        text = svg_chart(series, title="f and its Moreau envelopes")
    return _write(output, text, err)


def _gauge(kind, scale, expr):
    if kind == "max":
        return Gauge2D.max_norm()
    if kind == "l1":
        return Gauge2D.l1_norm()
    if kind == "euclid":
        return Gauge2D.scaled_euclidean(scale)
    if not expr:
        raise UsageError("--kind custom needs --expr")
    try:
        code = compile(expr, "<expr>", "eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse --expr: {exc.msg}") from None

    def evaluator(x, y):
        return np.asarray(eval(code, EXPR_NAMES, {"x": x, "y": y}), dtype=float)

    try:
        return Gauge2D.custom(evaluator)
    except InvalidGauge:
        raise
    except Exception as exc:
        raise UsageError(f"cannot evaluate --expr: {exc}") from None


def gauge_grid_csv(sg: SmoothedGauge, lo, hi, n):
    xs = np.linspace(lo, hi, n)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    X, Y = X.ravel(), Y.ravel()
    h, (px, py) = sg.evaluate((X, Y))
    base = sg.base(X, Y)
    region = sg.region((X, Y))
    rows = []
    for i in range(X.size):
        label = f"R{int(region[i])}" if region is not None else ""
        rows.append([X[i], Y[i], base[i], h[i], px[i], py[i], label])
    return to_csv(["x", "y", "f", "h_r", "prox_x", "prox_y", "region"], rows)


def gauge_circle(base, r_values, samples, fmt_="csv"):
    theta = unit_circle_angles(samples)
    curves = [(r, unit_circle(SmoothedGauge(base, r), samples)) for r in r_values]
    if fmt_ == "svg":
        series = [(f"rho_r(r={rlabel(r)})", [p[0] for p in pts] + [pts[0][0]], [p[1] for p in pts] + [pts[0][1]])
                  for r, pts in curves]
        return svg_chart(series, title="unit circles of h_r", equal_aspect=True)
    if len(curves) == 1:
        header = ["theta", "x", "y"]
    else:
        header = ["theta"] + [f"{c}(r={rlabel(r)})" for r, _ in curves for c in ("x", "y")]
    rows = []
    for i, t in enumerate(theta):
        row = [t]
        for _, pts in curves:
            row.extend(pts[i])
        rows.append(row)
    return to_csv(header, rows)


def cmd_gauge(kind, r_values, output, grid=None, circle=None, fmt_="csv", scale=1.0, expr=None,
              err=None):
    try:
        base = _gauge(kind, scale, expr)
    except InvalidGauge as exc:
        print(str(exc), file=err or sys.stderr)
        return EXIT_INVALID
    if (grid is None) == (circle is None):
        raise UsageError("give exactly one of --grid or --circle")
    try:
        if grid is not None:
            if fmt_ != "csv":
                raise UsageError("grid mode writes csv only")
            if len(r_values) != 1:
                raise UsageError("grid mode takes a single r")
            lo, hi, n = grid
            text = gauge_grid_csv(SmoothedGauge(base, r_values[0]), lo, hi, n)
        else:
            text = gauge_circle(base, r_values, circle, fmt_)
    except DegenerateRay as exc:
        print(f"degenerate gauge: {exc}", file=err or sys.stderr)
        return EXIT_DEGENERATE
    return _write(output, text, err)


def _write(output, text, err):
    err = err or sys.stderr
    try:
        if output in (None, "-"):
            sys.stdout.write(text)
        else:
            Path(output).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"cannot write {output}: {exc.strerror or exc}", file=err)
        return EXIT_PARSE
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _positive(v):
    x = float(v)
    if not x > 0 or x == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a finite value > 0, got {v}")
    return x


def _r_list(v):
    try:
        vals = [_positive(s) for s in v.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad r list {v!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("r list is empty")
    return vals


def _range(v):
    try:
        lo, hi = (float(s) for s in v.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {v!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError("range needs LO < HI")
    return lo, hi


def _grid(v):
    try:
        lo, hi, n = v.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI:N, got {v!r}") from None
    if not lo < hi or n < 2:
        raise argparse.ArgumentTypeError("grid needs LO < HI and N >= 2")
    return lo, hi, n


def build_parser():
    p = _Parser(prog="moreauenv", description="Moreau envelopes of convex piecewise cubics and smoothed gauges.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a function spec")
    s.add_argument("--input", required=True)

    s = sub.add_parser("eval", help="prox, envelope and gradient at one prox-centre")
    s.add_argument("--input", required=True)
    s.add_argument("--r", type=_positive, required=True)
    s.add_argument("--x", type=float, required=True)

    s = sub.add_parser("partition", help="print the prox-centre cells")
    s.add_argument("--input", required=True)
    s.add_argument("--r", type=_positive, required=True)

    s = sub.add_parser("compare", help="check closed forms against the bisection oracle")
    s.add_argument("--input", required=True)
    s.add_argument("--r", type=_positive, required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("plot", help="tabulate or draw f and e_r f")
    s.add_argument("--input", required=True)
    s.add_argument("--r", type=_r_list, required=True)
    s.add_argument("--range", type=_range, required=True, help="LO:HI (write --range=-4:3 for a negative LO)")
    s.add_argument("--samples", type=int, default=401)
    s.add_argument("--output", default="-")
    s.add_argument("--format", choices=("csv", "svg"), default="csv")

    s = sub.add_parser("gauge", help="smoothed gauge on a grid or its unit circle")
    s.add_argument("--kind", choices=("max", "l1", "euclid", "custom"), required=True)
    s.add_argument("--r", type=_r_list, required=True)
    s.add_argument("--grid", type=_grid, help="LO:HI:N (write --grid=-2:2:41)")
    s.add_argument("--circle", type=int, metavar="SAMPLES")
    s.add_argument("--scale", type=_positive, default=1.0, help="scale of the euclid gauge")
    s.add_argument("--expr", help="numpy expression in x and y for --kind custom")
    s.add_argument("--output", default="-")
    s.add_argument("--format", choices=("csv", "svg"), default="csv")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.input)
        if args.command == "eval":
            return cmd_eval(args.input, args.r, args.x)
        if args.command == "partition":
            return cmd_partition(args.input, args.r)
        if args.command == "compare":
            return cmd_compare(args.input, args.r, args.samples, args.seed)
        if args.command == "plot":
            return cmd_plot(args.input, args.r, *args.range, args.samples, args.output, args.format)
        if args.command == "gauge":
            if args.circle is not None and args.circle < 8:
                raise UsageError("--circle needs at least 8 samples")
            return cmd_gauge(args.kind, args.r, args.output, args.grid, args.circle, args.format,
                             args.scale, args.expr)
    except (UsageError, BadParam) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
