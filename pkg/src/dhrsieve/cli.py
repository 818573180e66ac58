"""Command-line front end.

Exit codes: 0 on success, 1 when a reproduction check or the ``P_r``
check fails, 2 on usage, parse or domain errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

from . import empirical, rbound
from .exceptions import DHRSieveError, PolynomialError
from .localdensity import IntPolynomial, is_admissible, nu1
from .numerics import DEFAULT_QUADRATURE
from .primes import primes_up_to
from .sievefn import SieveFunctions, default_evaluator

SCHEMA_VERSION = 1
FUNCTIONS = ("f1", "F1", "f2", "F2", "sigma2")
TARGETS = rbound.REFERENCE_TARGETS + ("all",)


class UsageError(Exception):
    pass


def _evaluator(args) -> SieveFunctions:
    return default_evaluator(args.tol if args.tol is not None else DEFAULT_QUADRATURE.rel_tol)


def _optimizer(args) -> rbound.Optimizer:
    if args.tol is None:
        return rbound.default_optimizer()
    return rbound.Optimizer(_evaluator(args))


def _json(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA_VERSION, **payload}, indent=2) + "\n"


def _grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("step must be positive")
    if stop < start:
        raise UsageError("'to' must not be below 'from'")
    n = math.floor((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(n)]


def cmd_eval(args) -> tuple[str, int]:
    value = float(_evaluator(args).get(args.which)(args.s))
    return f"{value:.12g}\n", 0


def cmd_table(args) -> tuple[str, int]:
    func = _evaluator(args).get(args.which)
    grid = _grid(args.start, args.stop, args.step)
    values = [float(v) for v in func(grid)] if grid else []
    if args.format == "json":
        rows = [{"s": s, "value": v} for s, v in zip(grid, values)]
        return _json({"function": args.which, "rows": rows}), 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "value"])
    for s, v in zip(grid, values):
        writer.writerow([repr(round(s, 12)), repr(v)])
    return buf.getvalue(), 0


def cmd_optimize(args) -> tuple[str, int]:
    opt = _optimizer(args)
    res = opt.result(args.k)
    return _json({
        "k": res.k,
        "delta0": round(opt.delta0, 6),
        "beta0": round(res.beta0, 6),
        "r_real": round(res.r_real, 6),
        "r_int": res.r_int,
        "branch": res.branch,
    }), 0


def cmd_constants(args) -> tuple[str, int]:
    c = _optimizer(args).constants
    return _json({name: round(v, 9) for name, v in c.as_dict().items()}), 0


def _computed_values(target: str, opt: rbound.Optimizer) -> dict[str, float]:
    if target == "constants":
        c = opt.constants
        out = {"delta0": c.delta0, "f1(6)": c.f1_at_6}
        out.update({n: getattr(c, n) for n in ("M1", "M2", "M3", "M4", "c1", "c2", "c")})
        return out
    if target == "sieve-values":
        sf = opt.sf
        return {"f1(6)": float(sf.f1(6.0)), "F1(2)": float(sf.F1(2.0)),
                "f1(4)": float(sf.f1(4.0)), "F2(2)": float(sf.F2(2.0)),
                "sigma2(4)": float(sf.sigma2(4.0)), "f2(4)": float(sf.f2(4.0))}
    ks = range(2, 7) if target == "table-beta0" else range(2, 11)
    out = {}
    for k in ks:
        res = opt.result(k)
        out[f"beta0[k={k}]"] = res.beta0
        out[f"r_real[k={k}]"] = res.r_real
        out[f"r[k={k}]"] = res.r_int
    return out


def reproduce_lines(target: str, opt: rbound.Optimizer) -> tuple[list[str], bool]:
    """One formatted check line per reference value and the overall verdict."""
    targets = rbound.REFERENCE_TARGETS if target == "all" else (target,)
    lines, ok = [], True
    for t in targets:
        computed = _computed_values(t, opt)
        for ref in (r for r in rbound.REFERENCE if r.target == t):
            value = computed[ref.name]
            diff = abs(value - ref.value)
            passed = diff <= ref.tol
            ok &= passed
            lines.append(f"{t:16s} {ref.name:14s} reference={ref.value:<10.6g} "
                         f"computed={value:<12.8g} |diff|={diff:.2e} tol={ref.tol:.0e} "
                         f"{'PASS' if passed else 'FAIL'}")
    return lines, ok


def cmd_reproduce(args) -> tuple[str, int]:
    lines, ok = reproduce_lines(args.target, _optimizer(args))
    return "\n".join(lines) + "\n", 0 if ok else 1


def _default_weights(k: int, args) -> tuple[int, float, float]:
    """Sieve parameters at the optimum for degree ``k`` unless overridden."""
    alpha, beta, r = args.alpha, args.beta, args.r
    if alpha is None or beta is None or r is None:
        if k < 2:
            raise UsageError("--r, --alpha and --beta are required for linear polynomials")
        res = rbound.default_optimizer().result(k)
        alpha = rbound.ALPHA0 / k if alpha is None else alpha
        beta = res.beta0 / k if beta is None else beta
        r = res.r_int if r is None else r
    return r, alpha, beta


def _parse_polynomial(text: str) -> IntPolynomial:
    """Parse and reject the reducible cases that are cheap to detect."""
    f = IntPolynomial.parse(text)
    if f.degree >= 2:
        roots = f.rational_roots()
        if roots:
            raise PolynomialError(f"{f} is reducible: it has the rational root {roots[0]}")
    print(f"note: results assume {f} is irreducible over Q", file=sys.stderr)
    return f


def cmd_empirical(args) -> tuple[str, int]:
    f = _parse_polynomial(args.poly)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", empirical.AdmissibilityWarning)
        seq = empirical.build_sequence(f, args.x)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    r, alpha, beta = _default_weights(f.degree, args)
    empirical.factorizations(seq, threads=args.threads)
    report = empirical.verify_Pr_deduction(seq, r, alpha, beta)
    stats = empirical.omega_statistics(seq, r)
    extra = {"admissible": not caught}
    if args.rows:
        with open(args.rows, "w", encoding="utf-8", newline="") as fh:
            fh.write(empirical.rows_csv(empirical.element_rows(seq, r, alpha, beta)))
    text = empirical.report_json(report, stats, timestamp=not args.no_timestamp, extra=extra)
    return text + "\n", 1 if report.pr_violations else 0


def cmd_admissible(args) -> tuple[str, int]:
    f = _parse_polynomial(args.poly)
    adm = is_admissible(f)
    bound = max(f.degree + 2, 2)
    nus = {str(p): nu1(f, p) for p in primes_up_to(bound).tolist()}
    return _json({"polynomial": str(f), "admissible": bool(adm),
                  "witness": adm.witness, "nu1": nus}), 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp field from JSON reports")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for cofactor splitting")
    common.add_argument("--tol", type=float, default=None,
                        help="relative quadrature tolerance")

    parser = argparse.ArgumentParser(
        prog="dhrsieve", description="DHR sifting functions and weighted-sieve bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a sifting function")
    p.add_argument("which", choices=FUNCTIONS)
    p.add_argument("s", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("table", parents=[common], help="tabulate a sifting function")
    p.add_argument("which", choices=FUNCTIONS)
    p.add_argument("start", type=float, metavar="from")
    p.add_argument("stop", type=float, metavar="to")
    p.add_argument("step", type=float)
    p.add_argument("format", nargs="?", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("optimize", parents=[common], help="optimal beta0 and r for degree k")
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("reproduce", parents=[common], help="check published values")
    p.add_argument("target", choices=TARGETS)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("empirical", parents=[common], help="exact weighted sieve on f(p)")
    p.add_argument("--poly", required=True, help="ascending coefficients c0,c1,...,ck")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--rows", metavar="CSV", help="also write per-element rows to CSV")
    p.set_defaults(func=cmd_empirical)

    p = sub.add_parser("admissible", parents=[common], help="admissibility of a polynomial")
    p.add_argument("--poly", required=True)
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("constants", parents=[common], help="named optimization constants")
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        text, code = args.func(args)
    except (UsageError, DHRSieveError, OverflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
