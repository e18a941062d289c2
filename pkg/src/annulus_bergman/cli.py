"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 domain or numerical failure, 3 oracle
envelope violation, 4 construction failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import asymptotics, zalcman
from .core import Annulus, Truncation
from .errors import BergmanError, ConstructionError, DomainError, OracleEnvelopeError
from .formatting import dumps, fmt
from .geometry import BergmanEval, bergman_eval, bergman_eval_log
from .oracle import oracle_bergman

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ENVELOPE, EXIT_CONSTRUCTION = 0, 1, 2, 3, 4
MIN_PLAIN_RADIUS = 1e-300

EVAL_FIELDS = ["L", "r", "alpha", "J0", "J1", "J2", "kernel", "metric_sq", "curvature", "defect", "terms_used"]
SWEEP_HEADER = [
    "L", "r", "alpha", "J0", "J1", "J2", "kernel", "metric_sq",
    "curvature", "defect", "regime", "rate", "defect_times_inv_rate",
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# Argument types
# --------------------------------------------------------------------------


def _radius(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError("radius must be positive and finite")
    if x < MIN_PLAIN_RADIUS:
        raise argparse.ArgumentTypeError(
            f"radius {text} is below {MIN_PLAIN_RADIUS:g}; pass it as a logarithm (--log-inner/--log-r)"
        )
    return x


def _unit_open(text: str) -> float:
    x = float(text)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"value must lie in (0, 1), got {text}")
    return x


def _positive(text: str) -> float:
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"value must be positive, got {text}")
    return x


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"value must be at least 1, got {text}")
    return n


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _trunc(args) -> Truncation:
    return Truncation(rel_tol=args.tol, n_min=min(8, args.nmax), n_max=args.nmax)


def _add_trunc(p):
    p.add_argument("--tol", type=_unit_open, default=1e-14, help="series truncation tolerance")
    p.add_argument("--nmax", type=_positive_int, default=100_000, help="series term cap")


def _add_ring(p, point: bool = True):
    p.add_argument("--inner", type=_radius, help="inner radius r")
    p.add_argument("--outer", type=_radius, help="outer radius R")
    p.add_argument("--log-inner", type=float, help="log of the inner radius")
    p.add_argument("--log-outer", type=float, help="log of the outer radius")
    p.add_argument("--center", type=complex, default=0j, help="ring centre, e.g. 0.1+0.2j")
    if point:
        p.add_argument("--point", type=complex, help="evaluation point z")


def _ring_logs(args, parser) -> tuple:
    if args.inner is not None and args.log_inner is not None:
        parser.error("--inner and --log-inner are mutually exclusive")
    if args.outer is not None and args.log_outer is not None:
        parser.error("--outer and --log-outer are mutually exclusive")
    li = math.log(args.inner) if args.inner is not None else args.log_inner
    lo = math.log(args.outer) if args.outer is not None else args.log_outer
    if lo is None:
        lo = 0.0
    if li is None:
        parser.error("an inner radius is required (--inner or --log-inner)")
    return li, lo


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------


def _eval_record(e: BergmanEval) -> dict:
    return {
        "L": e.L,
        "r": math.exp(-e.L),
        "alpha": e.alpha,
        "J0": e.j.j0,
        "J1": e.j.j1,
        "J2": e.j.j2,
        "kernel": e.kernel,
        "metric_sq": e.metric_sq,
        "curvature": e.curvature,
        "defect": e.defect,
        "terms_used": e.terms_used,
    }


def cmd_eval(args, parser, out) -> int:
    if args.point is not None and args.alpha is not None:
        parser.error("--point and --alpha are mutually exclusive")
    if args.alpha is not None:
        if args.log_r is None:
            parser.error("--alpha needs --log-r")
        if any(v is not None for v in (args.inner, args.outer, args.log_inner, args.log_outer)):
            parser.error("--alpha/--log-r describe P(r,1) at r^alpha; drop the radius flags")
        e = bergman_eval_log(-args.log_r, 0.0, -args.alpha * args.log_r, _trunc(args))
    else:
        if args.point is None:
            parser.error("either --point or --alpha/--log-r is required")
        if args.log_r is not None:
            parser.error("--log-r is only used with --alpha")
        li, lo = _ring_logs(args, parser)
        ann = Annulus(li, lo, args.center)
        e = bergman_eval(ann, args.point, _trunc(args))
    rec = _eval_record(e)
    if args.format == "json":
        out.write(dumps(rec) + "\n")
    else:
        out.write(",".join(EVAL_FIELDS) + "\n")
        out.write(",".join(fmt(rec[k]) for k in EVAL_FIELDS) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------


def _grid(start: float, stop: float, steps: int, spacing: str = "linear") -> List[float]:
    if steps == 1:
        return [start]
    if spacing == "log":
        return [float(x) for x in np.geomspace(start, stop, steps)]
    return [float(x) for x in np.linspace(start, stop, steps)]


def sweep_rows(alphas: Sequence[float], Ls: Sequence[float], trunc: Truncation, err=None) -> tuple:
    rows, failed = [], 0
    for a in alphas:
        law = asymptotics.regime(a)
        for L in Ls:
            try:
                e = bergman_eval_log(-L, 0.0, -a * L, trunc)
                inv_rate = math.exp(e.j.log_defect - law.log_rate(L))
                cells = [L, math.exp(-L), a, e.j.j0, e.j.j1, e.j.j2, e.kernel, e.metric_sq,
                         e.curvature, e.defect, law.regime.value, law.rate(L), inv_rate]
            except (BergmanError, ArithmeticError, ValueError) as exc:
                failed += 1
                if err is not None:
                    err.write(f"warning: cell alpha={fmt(a)} L={fmt(L)} failed: {exc}\n")
                cells = [L, math.exp(-L), a] + [math.nan] * 7 + [law.regime.value, math.nan, math.nan]
            rows.append(cells)
    return rows, failed


def cmd_sweep(args, parser, out) -> int:
    for name in ("alpha", "L"):
        if not getattr(args, f"{name}_start") < getattr(args, f"{name}_stop"):
            parser.error(f"--{name}-start must be smaller than --{name}-stop")
    if not (0 < args.alpha_start and args.alpha_stop < 1):
        parser.error("alpha grid must lie inside (0, 1)")
    if not args.L_start > 0:
        parser.error("L grid must be positive")
    alphas = _grid(args.alpha_start, args.alpha_stop, args.alpha_steps)
    Ls = _grid(args.L_start, args.L_stop, args.L_steps, args.L_spacing)
    rows, failed = sweep_rows(alphas, Ls, _trunc(args), sys.stderr)
    buf = io.StringIO()
    buf.write(",".join(SWEEP_HEADER) + "\n")
    for cells in rows:
        buf.write(",".join(c if isinstance(c, str) else fmt(c) for c in cells) + "\n")
    if args.out in (None, "-"):
        out.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(buf.getvalue())
    return EXIT_DOMAIN if failed else EXIT_OK


# --------------------------------------------------------------------------
# asym
# --------------------------------------------------------------------------


def cmd_asym(args, parser, out) -> int:
    a = args.alpha
    Ls = args.L_list
    if len(Ls) < 3 or any(y <= x for x, y in zip(Ls, Ls[1:])):
        parser.error("--L-list needs at least three increasing values")
    A_mag, source = args.A_mag, "assumed"
    ok = True
    if args.fit_A:
        fit_alpha = a if a > 2.0 / 3.0 else 0.8
        fit = asymptotics.fit_A([fit_alpha], args.fit_L_list)
        A_mag, source = fit.estimate, "fitted"
        out.write(
            f"fit_A alpha={fmt(fit_alpha)} A_mag={fmt(fit.estimate)} residual={fmt(fit.residual)} "
            f"dominance={fmt(fit.dominance)} exceeds_100={'yes' if fit.exceeds_bound else 'no'}\n"
        )
    out.write(f"A_mag={fmt(A_mag)} ({source})\n")
    names = ["r^(2a) J0 ~ 1/(-log r)", "r^(4a) J1 ~ (2r^(2a)+2r^(2-2a))/(1-r^2)", "r^(6a) J2 ~ A(r)/B(r)"]
    for i, name in enumerate(names):
        rep = asymptotics.tilde_verify(
            asymptotics.measured_display(i, a), asymptotics.predicted_display(i, a, A_mag), args.eps, Ls
        )
        ok &= rep.passed
        errs = " ".join(fmt(e) for e in rep.errors)
        out.write(f"tilde[{i}] {name}: {'pass' if rep.passed else 'FAIL'} errors={errs}\n")
    study = asymptotics.rate_constant_study(a, Ls)
    ok &= study.cauchy
    out.write(
        f"rate {study.law.regime.value} exponent={fmt(study.law.exponent)} "
        f"products={' '.join(fmt(p) for p in study.products)} spread={fmt(study.spread)} "
        f"cauchy={'pass' if study.cauchy else 'FAIL'}\n"
    )
    if args.csv:
        with open(args.csv, "w", newline="\n") as fh:
            fh.write("L,defect_times_inv_rate\n")
            for L, p in zip(study.L_list, study.products):
                fh.write(f"{fmt(L)},{fmt(p)}\n")
    return EXIT_OK if ok else EXIT_DOMAIN


# --------------------------------------------------------------------------
# oracle
# --------------------------------------------------------------------------


def cmd_oracle(args, parser, out) -> int:
    if args.point is None:
        parser.error("--point is required")
    li, lo = _ring_logs(args, parser)
    ann = Annulus(li, lo, args.center)
    main = bergman_eval(ann, args.point)
    orc = oracle_bergman(ann, args.point, args.basis, args.radial_nodes, args.angular_nodes, args.window)
    worst = 0.0
    out.write("quantity,series,oracle,rel_dev\n")
    for name, a, b in (
        ("J0", main.j.log_j0, orc.j.log_j0),
        ("J1", main.j.log_j1, orc.j.log_j1),
        ("J2", main.j.log_j2, orc.j.log_j2),
    ):
        dev = abs(math.expm1(b - a))
        worst = max(worst, dev)
        out.write(f"{name},{fmt(math.exp(a))},{fmt(math.exp(b))},{fmt(dev)}\n")
    cdev = abs(orc.curvature - main.curvature) / abs(main.curvature)
    out.write(f"curvature,{fmt(main.curvature)},{fmt(orc.curvature)},{fmt(cdev)}\n")
    return EXIT_OK if worst <= args.rel_tol else EXIT_DOMAIN


# --------------------------------------------------------------------------
# zalcman
# --------------------------------------------------------------------------


def cmd_zalcman(args, parser, out) -> int:
    if args.validate:
        with open(args.validate) as fh:
            dom = zalcman.from_json(fh.read())
        rep = zalcman.validate_geometry(dom)
        if rep.ok:
            out.write("pass\n")
            return EXIT_OK
        for v in rep.violations:
            out.write(f"FAIL {v}\n")
        return EXIT_DOMAIN
    if args.theta is None or args.levels is None:
        parser.error("--theta and --levels are required unless --validate is given")
    dom = zalcman.construct(args.theta, args.levels, args.slack, args.n_ceiling)
    text = zalcman.to_json(dom)
    if args.out in (None, "-"):
        out.write(text)
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser and entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="annulus-bergman", description="Bergman kernel, metric and curvature of annuli.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    e = sub.add_parser("eval", help="evaluate at one point")
    _add_ring(e)
    e.add_argument("--alpha", type=_unit_open, help="relative position of the point in P(r,1)")
    e.add_argument("--log-r", type=_positive, help="L = -ln r for the P(r,1) / r^alpha geometry")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_trunc(e)

    s = sub.add_parser("sweep", help="CSV grid over (alpha, L) for P(r,1) at r^alpha")
    s.add_argument("--alpha-start", type=float, default=0.1)
    s.add_argument("--alpha-stop", type=float, default=0.9)
    s.add_argument("--alpha-steps", type=_positive_int, default=9)
    s.add_argument("--L-start", type=float, default=1.0)
    s.add_argument("--L-stop", type=float, default=80.0)
    s.add_argument("--L-steps", type=_positive_int, default=10)
    s.add_argument("--L-spacing", choices=("linear", "log"), default="linear")
    s.add_argument("--out", default="-", help="output path, '-' for stdout")
    _add_trunc(s)

    a = sub.add_parser("asym", help="asymptotic trend checks")
    a.add_argument("--alpha", type=_unit_open, required=True)
    a.add_argument("--L-list", type=_float_list, default=[10.0, 20.0, 40.0, 80.0])
    a.add_argument("--eps", type=_positive, default=0.02)
    a.add_argument("--fit-A", action="store_true", help="fit the free coefficient and use it")
    a.add_argument("--fit-L-list", type=_float_list, default=[30.0, 60.0, 90.0])
    a.add_argument("--A-mag", type=_positive, default=asymptotics.DEFAULT_A_MAG)
    a.add_argument("--csv", help="write the rate products to this file")

    o = sub.add_parser("oracle", help="compare the series path with the quadrature oracle")
    _add_ring(o)
    o.add_argument("--basis", type=_positive_int, default=40)
    o.add_argument("--radial-nodes", type=_positive_int)
    o.add_argument("--angular-nodes", type=_positive_int)
    o.add_argument("--window", choices=("balanced", "symmetric"), default="balanced")
    o.add_argument("--rel-tol", type=_positive, default=1e-6)

    z = sub.add_parser("zalcman", help="build or validate a certified hole sequence")
    z.add_argument("--theta", type=_unit_open)
    z.add_argument("--levels", type=_positive_int)
    z.add_argument("--slack", type=float, default=0.1)
    z.add_argument("--n-ceiling", type=_positive_int, default=zalcman.N_CEILING)
    z.add_argument("--out", default="-")
    z.add_argument("--validate", metavar="PATH", help="re-check a JSON file instead of building")
    return p


COMMANDS = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "asym": cmd_asym,
    "oracle": cmd_oracle,
    "zalcman": cmd_zalcman,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        return COMMANDS[args.command](args, sub, out)
    except OracleEnvelopeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ENVELOPE
    except ConstructionError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONSTRUCTION
    except (DomainError, BergmanError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
