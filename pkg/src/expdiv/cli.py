"""Command-line front end.

Subcommands: values (pointwise evaluation), sum (exact summatory values by
sieve and/or convolution), dcount (generalized divisor counts), constants
(Euler-product constants with tail bounds), verify (exact identity suites),
residuals (secondary-term tables and log-polynomial fits).

Data goes to stdout (or --out) as CSV or a single JSON document; progress and
timing go to stderr. Identical configurations produce byte-identical data
output regardless of worker count. Exit codes: 0 success, 2 usage error,
3 verification failure, 4 capacity/precision error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from decimal import Decimal, InvalidOperation

import numpy as np
from mpmath import mp, mpf

from .arith import iroot
from .asymptotics import (
    EulerProductResult,
    empirical_exponent,
    error_exponent_general,
    euler_constant,
    fit_log_poly,
    residual_table,
    secondary_constant_wu,
    verify_factorization,
    zeta_real,
)
from .errors import (
    BoundViolationError,
    CapacityError,
    DegenerateDataError,
    DivergenceError,
    HypothesisError,
    PrecisionError,
)
from .expfn import (
    TheoremProfile,
    convolve,
    mu_ell_fn,
    mu_ell_h,
    phi_e_fn,
    tau_e_fn,
    tau_k_e_fn,
    unit_fn,
)
from .summatory import (
    d_count,
    d_pointwise_table,
    enumerate_full,
    pointwise_values,
    summatory_convolution,
    summatory_convolution_table,
    summatory_sieve,
    summatory_sieve_at,
)
from .expfn import derive_v, evaluate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_CAPACITY = 4

ENV_WORKERS = "EXPDIV_WORKERS"
FN_CHOICES = ("tau_e", "phi_e", "tau_k_e", "unit")
DEFAULT_GRID_RATIO = 10.0 ** 0.25


def parse_count(text: str) -> int:
    """Positive-integer CLI argument; accepts scientific notation like 1e8."""
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return int(d)


def fmt_real(v, digits: int = 17) -> str:
    if isinstance(v, float):
        return repr(v)
    return mp.nstr(v, digits)


def _resolve_workers(args) -> int:
    w = getattr(args, "workers", None)
    if w is None:
        w = os.environ.get(ENV_WORKERS)
    if w is None:
        return 1
    w = int(w)
    if w < 1:
        raise ValueError(f"worker count must be >= 1, got {w}")
    return w


def _progress(label: str, x: int):
    """Coarse stderr progress for long sieves; None for quick runs."""
    if x < 10**7:
        return None
    state = {"last": -1}

    def cb(done, total):
        decile = done * 10 // total
        if decile != state["last"]:
            state["last"] = decile
            print(f"{label}: {done}/{total} blocks", file=sys.stderr)

    return cb


def resolve_function(args):
    """Map --fn/--pow/--k/--ell to an exponent function and its profile.

    Defaults follow the families themselves: tau_e^r -> (2, 2^r),
    tau_k_e -> (2, k), phi_e^r -> (3, 2^r), unit -> (2, 1). An --ell
    override is honored but still goes through hypothesis validation.
    """
    kind = args.fn
    r = getattr(args, "pow", None) or 1
    if r < 1:
        raise ValueError(f"--pow must be >= 1, got {r}")
    k = getattr(args, "k", None)
    if kind == "tau_e":
        f, ell, kk = tau_e_fn(r), 2, 2**r
    elif kind == "phi_e":
        f, ell, kk = phi_e_fn(r), 3, 2**r
    elif kind == "tau_k_e":
        if k is None or k < 2:
            raise ValueError("--fn tau_k_e requires --k with k >= 2")
        f, ell, kk = tau_k_e_fn(k, r), 2, k**r
    elif kind == "unit":
        f, ell, kk = unit_fn(), 2, 1
    else:
        raise ValueError(f"unknown function selector {kind!r}")
    override = getattr(args, "ell", None)
    if override is not None:
        ell = override
        kk = f.value_at(ell)
    return f, TheoremProfile(ell, kk)


def _emit(args, command: str, config: dict, results, errors: list,
          csv_header, csv_rows) -> None:
    """Render the document. Worker count and output path are runtime knobs,
    not part of the configuration, so they are never echoed into the data."""
    if args.format == "json":
        doc = {"command": command, "config": config, "results": results,
               "errors": errors}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [",".join(csv_header)]
        lines.extend(",".join(row) for row in csv_rows)
        text = "\n".join(lines) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _base_config(args, profile=None) -> dict:
    cfg = {"fn": getattr(args, "fn", None)}
    for key in ("pow", "k"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if profile is not None:
        cfg["ell"] = profile.ell
        cfg["profile_k"] = profile.k
    cfg["format"] = args.format
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def cmd_values(args) -> int:
    f, profile = resolve_function(args)
    lo, hi = args.from_, args.to
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= --from <= --to")
    vals = pointwise_values(f, hi)
    config = _base_config(args, profile)
    config.update({"from": lo, "to": hi})
    rows = [(str(n), str(int(vals[n]))) for n in range(lo, hi + 1)]
    results = {"values": [{"n": n, "value": str(int(vals[n]))}
                          for n in range(lo, hi + 1)]}
    _emit(args, "values", config, results, [], ("n", "value"), rows)
    return EXIT_OK


def cmd_sum(args) -> int:
    f, profile = resolve_function(args)
    x = args.x
    workers = _resolve_workers(args)
    methods = ("sieve", "convolution") if args.method == "both" else (args.method,)
    outcomes = []
    for method in methods:
        if method == "sieve":
            res = summatory_sieve(f, x, workers=workers,
                                  progress=_progress("sieve", x))
        else:
            res = summatory_convolution(f, profile, x)
        print(f"method={res.method} elapsed={res.elapsed:.3f}s", file=sys.stderr)
        outcomes.append(res)
    config = _base_config(args, profile)
    config.update({"x": x, "method": args.method})
    rows = [(str(r.x), str(r.value), r.method) for r in outcomes]
    results = {"sums": [{"x": r.x, "value": str(r.value), "method": r.method}
                        for r in outcomes]}
    errors = []
    code = EXIT_OK
    if len(outcomes) == 2 and outcomes[0].value != outcomes[1].value:
        errors.append({
            "error": "method-mismatch",
            "sieve": str(outcomes[0].value),
            "convolution": str(outcomes[1].value),
        })
        code = EXIT_VERIFY
    _emit(args, "sum", config, results, errors, ("x", "value", "method"), rows)
    if code:
        print("error: sieve and convolution disagree", file=sys.stderr)
    return code


def cmd_dcount(args) -> int:
    k, ell, x = args.k, args.ell, args.x
    if k < 1:
        raise ValueError(f"--k must be >= 1, got {k}")
    if ell < 2:
        raise ValueError(f"--ell must be >= 2, got {ell}")
    count = d_count(k, ell, x)
    config = {"k": k, "ell": ell, "x": x, "compare": bool(args.compare),
              "format": args.format}
    results = {"count": str(count)}
    if args.compare:
        with mp.workprec(120):
            zl = zeta_real(ell)
            approx = zl ** (k - 1) * x
            if k == 2:
                approx = zl * x + zeta_real(mpf(1) / ell) * mpf(x) ** (mpf(1) / ell)
            diff = mpf(count) - approx
        results["approximation"] = fmt_real(approx, 20)
        results["difference"] = fmt_real(diff, 20)
        header = ("k", "ell", "x", "count", "approximation", "difference")
        rows = [(str(k), str(ell), str(x), str(count),
                 fmt_real(approx, 20), fmt_real(diff, 20))]
    else:
        header = ("k", "ell", "x", "count")
        rows = [(str(k), str(ell), str(x), str(count))]
    _emit(args, "dcount", config, results, [], header, rows)
    return EXIT_OK


def cmd_constants(args) -> int:
    entries: list[tuple[str, EulerProductResult]] = []
    config = {"format": args.format}
    if args.fn:
        f, profile = resolve_function(args)
        pmax = args.pmax or 10**6
        amax = args.amax or 120
        entries.append((f.name, euler_constant(f, profile.ell, pmax, amax)))
        config.update(_base_config(args, profile))
        config.update({"pmax": pmax, "amax": amax})
    if args.wu_B:
        pmax = args.pmax or 10**5
        amax = args.amax or 120
        entries.append(("wu_secondary", secondary_constant_wu(pmax, amax)))
        config["wu_B"] = True
    if not entries:
        raise ValueError("constants needs --fn and/or --wu-B")
    header = ("name", "value", "p_max", "a_max", "tail_estimate")
    rows = [(name, fmt_real(res.value, 25), str(res.p_max), str(res.a_max),
             repr(res.tail_estimate)) for name, res in entries]
    results = {"constants": [
        {"name": name, "value": fmt_real(res.value, 25), "p_max": res.p_max,
         "a_max": res.a_max, "tail_estimate": res.tail_estimate}
        for name, res in entries
    ]}
    _emit(args, "constants", config, results, [], header, rows)
    return EXIT_OK


def _verify_lemma(args):
    """Closed form of the iterated mu_ell convolution vs the literal iteration."""
    cases = failures = 0
    first = None
    for ell in range(1, args.ellmax + 1):
        base = mu_ell_fn(ell)
        iterated = base
        for h in range(1, args.hmax + 1):
            for a in range(0, args.amax + 1):
                cases += 1
                want = iterated.value_at(a)
                got = mu_ell_h(h, ell, a)
                if got != want:
                    failures += 1
                    if first is None:
                        first = {"h": h, "ell": ell, "a": a,
                                 "closed_form": got, "convolution": want}
            iterated = convolve(iterated, base)
    return cases, failures, first


def _verify_identity(args):
    """Sieve vs convolution over a full range, plus the pointwise identity."""
    f, profile = resolve_function(args)
    xmax = args.xmax
    v = derive_v(f, profile)
    vals = pointwise_values(f, xmax)
    sieve_tab = np.cumsum(vals)
    conv_tab = summatory_convolution_table(f, profile, xmax, v=v)
    cases = failures = 0
    first = None

    bad = np.flatnonzero(sieve_tab[1:] != conv_tab[1:])
    cases += xmax
    if bad.size:
        failures += int(bad.size)
        x0 = int(bad[0]) + 1
        first = {"check": "summatory", "x": x0,
                 "sieve": str(int(sieve_tab[x0])),
                 "convolution": str(int(conv_tab[x0]))}

    dvals = d_pointwise_table(profile.k, profile.ell, xmax)
    point = np.zeros(xmax + 1, dtype=np.int64)
    for b, fact in enumerate_full(profile.ell + 2, xmax).entries:
        vb = evaluate(v, fact)
        if vb:
            point[b::b] += vb * dvals[1 : xmax // b + 1]
    badp = np.flatnonzero(point[1:] != vals[1:])
    cases += xmax
    if badp.size:
        failures += int(badp.size)
        if first is None:
            n0 = int(badp[0]) + 1
            first = {"check": "pointwise", "n": n0,
                     "f": str(int(vals[n0])), "convolved": str(int(point[n0]))}

    # direct operation calls at sampled points
    rng = random.Random(args.seed)
    for x in sorted(rng.randint(1, xmax) for _ in range(10)):
        cases += 1
        a = summatory_sieve(f, x).value
        b = summatory_convolution(f, profile, x, v=v).value
        if a != b:
            failures += 1
            if first is None:
                first = {"check": "sampled", "x": x, "sieve": str(a),
                         "convolution": str(b)}
    return cases, failures, first


def cmd_verify(args) -> int:
    config = {"suite": args.suite, "format": args.format}
    errors = []
    if args.suite == "lemma":
        config.update({"hmax": args.hmax, "ellmax": args.ellmax,
                       "amax": args.amax})
        cases, failures, first = _verify_lemma(args)
        rows = [("lemma", str(cases), str(failures))]
        results = {"checks": [{"check": "lemma", "cases": cases,
                               "failures": failures}]}
    elif args.suite == "identity":
        f, profile = resolve_function(args)
        config.update(_base_config(args, profile))
        config.update({"xmax": args.xmax, "seed": args.seed})
        cases, failures, first = _verify_identity(args)
        rows = [("identity", str(cases), str(failures))]
        results = {"checks": [{"check": "identity", "cases": cases,
                               "failures": failures}]}
    else:  # dirichlet
        f, profile = resolve_function(args)
        config.update(_base_config(args, profile))
        config.update({"s": args.s, "n": args.n})
        report = verify_factorization(f, profile, args.s, args.n)
        cases, failures = 1, 0 if report.passed else 1
        first = None if report.passed else {
            "check": "dirichlet", "gap": report.gap,
            "tail_bound": report.tail_bound,
        }
        rows = [("dirichlet", "1", str(failures))]
        results = {"checks": [{
            "check": "dirichlet", "cases": 1, "failures": failures,
            "gap": report.gap, "tail_bound": report.tail_bound,
            "lhs": report.lhs, "rhs": report.rhs,
        }]}
    if first is not None:
        errors.append(first)
    _emit(args, "verify", config, results, errors,
          ("check", "cases", "failures"), rows)
    if failures:
        print(f"verification failed; first counterexample: {first}",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _build_grid(xmax: int, points, ratio: float) -> list[int]:
    if ratio <= 1.0:
        raise ValueError(f"--grid-ratio must exceed 1, got {ratio}")
    if points is not None and points < 1:
        raise ValueError(f"--points must be >= 1, got {points}")
    xs = []
    x = float(xmax)
    count = points if points is not None else 10**9
    floor_x = 1000.0 if points is None else 0.999
    while len(xs) < count and x >= max(floor_x, 1.0):
        xs.append(int(round(x)))
        x /= ratio
    grid = sorted(set(xs))
    if not grid:
        raise ValueError("empty residual grid")
    return grid


def cmd_residuals(args) -> int:
    f, profile = resolve_function(args)
    ell = profile.ell
    grid = _build_grid(args.xmax, args.points, args.grid_ratio)
    workers = _resolve_workers(args)
    pmax = args.pmax or 10**6
    amax = args.amax or 120
    const = euler_constant(f, ell, pmax, amax)
    table = residual_table(f, const, ell, grid, workers=workers,
                           progress=_progress("residuals", args.xmax))
    degree = args.fit_degree
    if degree is None:
        degree = max(profile.k - 2, 0)
    fit = fit_log_poly(table, degree)

    fit_info = {
        "degree": fit.degree,
        "coefficients": fit.coefficients,
        "rms": fit.rms,
    }
    try:
        fit_info["residual_slope"] = empirical_exponent(
            [r.x for r in table.rows], [float(r.residual) for r in table.rows]
        )
        if profile.k >= 2:
            fit_info["reference_exponent"] = float(
                error_exponent_general(profile.k, ell)
            )
    except DegenerateDataError:
        pass
    if args.fn == "tau_e" and (args.pow or 1) == 1 and ell == 2:
        wu = secondary_constant_wu()
        c0 = fit.coefficients[0]
        fit_info["wu_constant"] = float(wu.value)
        fit_info["wu_relative_gap"] = abs(c0 - float(wu.value)) / abs(float(wu.value))

    config = _base_config(args, profile)
    config.update({"xmax": args.xmax, "points": args.points,
                   "grid_ratio": args.grid_ratio, "pmax": pmax, "amax": amax,
                   "fit_degree": degree})
    header = ("x", "sum", "residual", "normalized")
    rows = [(str(r.x), str(r.total), fmt_real(r.residual, 17),
             fmt_real(r.normalized, 17)) for r in table.rows]
    results = {
        "constant": {"value": fmt_real(const.value, 25),
                     "tail_estimate": const.tail_estimate},
        "rows": [{"x": r.x, "sum": str(r.total),
                  "residual": fmt_real(r.residual, 17),
                  "normalized": fmt_real(r.normalized, 17)}
                 for r in table.rows],
        "fit": fit_info,
    }
    _emit(args, "residuals", config, results, [], header, rows)
    if args.format == "csv":
        # keep the CSV stream pure; the fit summary goes to stderr
        print(f"fit: {json.dumps(fit_info)}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_fn_flags(p, include_pow=True):
    p.add_argument("--fn", choices=FN_CHOICES, help="function family")
    if include_pow:
        p.add_argument("--pow", type=int, default=None,
                       help="integer power r >= 1 applied pointwise (default 1)")
    p.add_argument("--k", type=int, default=None,
                   help="dimension parameter for tau_k_e (or dcount)")
    p.add_argument("--ell", type=int, default=None,
                   help="override the exponent-shape parameter (validated)")


def _add_io_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write data here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expdiv",
        description="Exponential divisor functions: exact evaluation, exact "
                    "summation by two methods, divisor counts, Euler-product "
                    "constants, verification suites, and residual studies.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("values", help="pointwise values over a range")
    _add_fn_flags(p)
    p.add_argument("--from", dest="from_", type=parse_count, required=True)
    p.add_argument("--to", dest="to", type=parse_count, required=True)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_values)

    p = sub.add_parser("sum", help="exact summatory value at x")
    _add_fn_flags(p)
    p.add_argument("--x", type=parse_count, required=True)
    p.add_argument("--method", choices=("sieve", "convolution", "both"),
                   default="sieve")
    p.add_argument("--workers", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_sum)

    p = sub.add_parser("dcount", help="generalized divisor count D(1,ell,...,ell; x)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--x", type=parse_count, required=True)
    p.add_argument("--compare", action="store_true",
                   help="also print the analytic approximation")
    _add_io_flags(p)
    p.set_defaults(handler=cmd_dcount)

    p = sub.add_parser("constants", help="Euler-product constants with tail bounds")
    _add_fn_flags(p)
    p.add_argument("--wu-B", dest="wu_B", action="store_true",
                   help="also compute the secondary-term constant of tau_e")
    p.add_argument("--pmax", type=parse_count, default=None)
    p.add_argument("--amax", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("verify", help="exact verification suites")
    p.add_argument("suite", choices=("lemma", "identity", "dirichlet"))
    _add_fn_flags(p)
    p.add_argument("--hmax", type=int, default=6)
    p.add_argument("--ellmax", type=int, default=4)
    p.add_argument("--amax", type=int, default=48)
    p.add_argument("--xmax", type=parse_count, default=100_000)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--n", type=parse_count, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("residuals", help="secondary-term residual table and fit")
    _add_fn_flags(p)
    p.add_argument("--xmax", type=parse_count, required=True)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--grid-ratio", dest="grid_ratio", type=float,
                   default=DEFAULT_GRID_RATIO)
    p.add_argument("--fit-degree", dest="fit_degree", type=int, default=None)
    p.add_argument("--pmax", type=parse_count, default=None)
    p.add_argument("--amax", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_residuals)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    if not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if getattr(args, "fn", None) is None and args.command in ("values", "sum"):
        print("error: --fn is required", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "verify" and args.suite in ("identity", "dirichlet") \
            and getattr(args, "fn", None) is None:
        print("error: --fn is required for this suite", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "residuals" and getattr(args, "fn", None) is None:
        print("error: --fn is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except (CapacityError, PrecisionError, DivergenceError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except BoundViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (HypothesisError, DegenerateDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
