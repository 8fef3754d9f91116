"""Command-line front end.

    riccati-chain chain -n 3
    riccati-chain depress --order 4 --opaque
    riccati-chain schwarzian "(2*x+1)/(x+3)" --at 0,1,2
    riccati-chain run --spec problem.json --seed 0 --out report.json
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .chain import LinearODE, build_chain, linearize
from .expr import as_expr, to_text
from .jet import ChainParams, SingularityError, cole_hopf_residuals
from .numverify import IntegrationError
from .parser import ParseError
from .pipeline import OPAQUE, ProblemSpec, SpecError, check_ratio, check_roundtrip, dump_report, load_spec, run_checks
from .reduce import ReductionError, depress
from .schwarz import CriticalPointError, schwarzian_at

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _interval(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected A:B") from None
    return a, b


def _points(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers") from None


def _alphas(text: str | None) -> tuple[str, ...] | None:
    if text is None or text == OPAQUE:
        return None
    return tuple(s.strip() for s in text.split(","))


def _spec_from_args(args, checks: tuple[str, ...]) -> ProblemSpec:
    kw = dict(n=args.n, c=args.c, alphas=_alphas(args.alphas), checks=checks)
    if getattr(args, "interval", None):
        kw["interval"] = args.interval
    if getattr(args, "step", None):
        kw["step"] = args.step
    if getattr(args, "tol", None):
        kw["tol"] = args.tol
    return ProblemSpec(**kw)


def cmd_chain(args) -> int:
    params = _spec_from_args(args, ()).params()
    print(build_chain(params))
    return EXIT_OK


def cmd_linearize(args) -> int:
    params = _spec_from_args(args, ()).params()
    print(linearize(params))
    return EXIT_OK


def cmd_depress(args) -> int:
    if args.coeffs is not None:
        ode = LinearODE(tuple(as_expr(s) for s in args.coeffs.split(",")))
        if ode.order != args.order:
            raise SpecError(f"--coeffs gives order {ode.order}, not {args.order}")
    else:
        if args.order < 2:
            raise SpecError("--order must be at least 2")
        ode = linearize(ChainParams.opaque(args.order - 1))
    red = depress(ode)
    print(f"gauge: {red.gauge}")
    for k, c in red.depressed_terms():
        print(f"v{chr(39) * k}(x): {to_text(c)}")
    print(red)
    return EXIT_OK


def cmd_schwarzian(args) -> int:
    f = as_expr(args.expr)
    for x0 in args.at:
        try:
            value = float(schwarzian_at(f, x0))
        except (CriticalPointError, ZeroDivisionError, ValueError) as exc:
            print(f"{x0:g}\terror: {exc}")
            continue
        print(f"{x0:g}\t{value:.12g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec_from_args(args, ("roundtrip", "ratio"))
    params = spec.params()
    ok = True
    rt = check_roundtrip(spec, params, np.random.default_rng([args.seed, 3]))
    ok &= rt["passed"]
    if "residual" in rt:
        print(
            f"roundtrip n={spec.n}: residual {rt['residual']:.3e}, "
            f"half step {rt['residual_half_step']:.3e}  {'PASS' if rt['passed'] else 'FAIL'}"
        )
    else:
        print(f"roundtrip n={spec.n}: no usable instantiation  FAIL")
    ratio = check_ratio(spec, params, np.random.default_rng([args.seed, 4]))
    ok &= ratio["passed"]
    print(f"ratio: max deviation {ratio['max_deviation']:.3e}  {'PASS' if ratio['passed'] else 'FAIL'}")
    if args.plot and "instantiation" in rt:
        _write_profile(args.plot, spec, params, rt)
    return EXIT_OK if ok else EXIT_FAIL


def _write_profile(path: str, spec: ProblemSpec, params: ChainParams, rt: dict) -> None:
    """Residual profile as two whitespace-separated columns."""
    from .evaluate import SymbolTable
    from .numverify import IVP, integrate

    table = SymbolTable(rt["instantiation"], interval=spec.interval)
    phi = integrate(IVP(linearize(params), spec.init, spec.x0, spec.interval[1], spec.step, table))
    prof = cole_hopf_residuals(build_chain(params).lhs, params.c, phi, table)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# x residual\n")
        for x, r in zip(prof.x, prof.residual):
            if np.isfinite(r):
                fh.write(f"{x:.6f} {r:.6e}\n")


def cmd_run(args) -> int:
    spec = load_spec(args.spec)
    overrides = {}
    if args.interval:
        overrides["interval"] = args.interval
        if not args.interval[0] <= spec.x0 < args.interval[1]:
            overrides["x0"] = args.interval[0]
    if args.step:
        overrides["step"] = args.step
    if args.tol:
        overrides["tol"] = args.tol
    if overrides:
        spec = replace(spec, **overrides)
    report = run_checks(spec, args.seed, timing=args.timing)
    text = dump_report(report)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    for check in report["checks"]:
        print(f"{check['name']}: {'PASS' if check['passed'] else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _numeric_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--step", type=float, help="integration step")
    p.add_argument("--interval", type=_interval, help="integration interval A:B")
    p.add_argument("--tol", type=float, help="pass threshold for numeric checks")


def _chain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-n", type=int, required=True, help="chain order")
    p.add_argument("-c", default="c", help='chain constant: a number, or "c" to keep it symbolic')
    p.add_argument("--alphas", help='comma-separated a0..an, or "opaque" (default)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riccati-chain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain", help="print the expanded chain equation")
    _chain_flags(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("linearize", help="print the linear equation for phi")
    _chain_flags(p)
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("depress", help="remove the subleading derivative of a linear equation")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--opaque", action="store_true", help="use the opaque linearization (the default)")
    p.add_argument("--coeffs", help="comma-separated coefficients of phi, phi', ... (overrides --opaque)")
    p.set_defaults(func=cmd_depress)

    p = sub.add_parser("schwarzian", help="evaluate the Schwarzian of an expression")
    p.add_argument("expr")
    p.add_argument("--at", type=_points, required=True, help="comma-separated points")
    p.set_defaults(func=cmd_schwarzian)

    p = sub.add_parser("verify", help="numeric round trip and ratio checks")
    _chain_flags(p)
    _numeric_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", help="write the residual profile as x/value columns")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run a problem file and write a JSON report")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--timing", action="store_true", help="record wall-clock times (breaks byte-identity)")
    _numeric_flags(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ReductionError, SingularityError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
