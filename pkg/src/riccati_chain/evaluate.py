"""Numeric evaluation of expressions and randomized identity testing."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np
from scipy.integrate import simpson

from .canon import same
from .expr import (
    Add,
    Const,
    Div,
    Expr,
    Func,
    Int,
    Mul,
    Neg,
    Param,
    Pow,
    Sym,
    X,
    as_expr,
    free_names,
    nth_derivative,
    x as X_,
)
from .taylor import Taylor

REL_TOL = 1e-9
MAX_RESAMPLES = 100


class EvaluationError(ValueError):
    """Division by zero, log of a non-positive value, missing symbol, non-finite result."""


@dataclass(frozen=True)
class SymbolTable:
    """Closed-form instantiations of opaque symbols and parameters.

    ``base`` is the lower limit used for ``Int`` nodes, integrated with
    composite Simpson at spacing ``step``. ``interval`` is where random
    sample points are drawn by :func:`equals`.
    """

    entries: Mapping[str, Expr] = field(default_factory=dict)
    base: float = 0.0
    step: float = 1e-3
    interval: tuple[float, float] = (-1.0, 1.0)
    _derivs: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", {k: as_expr(v) for k, v in self.entries.items()})

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def derivative(self, name: str, order: int) -> Expr:
        key = (name, order)
        if key not in self._derivs:
            if name not in self.entries:
                raise EvaluationError(f"symbol {name!r} has no instantiation")
            self._derivs[key] = nth_derivative(self.entries[name], order)
        return self._derivs[key]

    def with_entries(self, **entries) -> SymbolTable:
        merged = dict(self.entries)
        merged.update(entries)
        return SymbolTable(merged, self.base, self.step, self.interval)


EMPTY = SymbolTable()


def _as_fraction(v: float) -> Fraction:
    return Fraction(v).limit_denominator(10**6)


def random_polynomial(rng: np.random.Generator, degree: int = 3, scale: float = 2.0) -> Expr:
    coeffs = rng.uniform(-scale, scale, size=degree + 1)
    e: Expr = Const(0)
    for k, c in enumerate(coeffs):
        e = e + Const(_as_fraction(c)) * (X_**k if k else Const(1))
    return e


def random_table(
    expressions: Iterable[Expr] | Iterable[str],
    rng: np.random.Generator | int | None = None,
    degree: int = 3,
    interval: tuple[float, float] = (-1.0, 1.0),
) -> SymbolTable:
    """Instantiate every opaque name in ``expressions`` at random.

    Symbols become polynomials of ``degree`` with coefficients uniform in
    [-2, 2]; parameters become constants with magnitude in [0.5, 2].
    Plain strings are taken as symbol names, ``(kind, name)`` pairs as
    returned by ``free_names`` are used as they are.
    """
    rng = np.random.default_rng(rng)
    names: set[tuple[str, str]] = set()
    for e in expressions:
        if isinstance(e, str):
            names.add(("param" if e == "c" else "sym", e))
        elif isinstance(e, tuple):
            names.add(e)
        else:
            names |= free_names(e)
    entries: dict[str, Expr] = {}
    for kind, name in sorted(names):
        if kind == "param":
            mag = rng.uniform(0.5, 2.0)
            sign = 1 if rng.uniform() < 0.5 else -1
            entries[name] = Const(_as_fraction(sign * mag))
        else:
            entries[name] = random_polynomial(rng, degree)
    return SymbolTable(entries, interval=interval)


def _check(v, what: str):
    if isinstance(v, Taylor):
        if not v.finite():
            raise EvaluationError(f"non-finite value in {what}")
    elif not np.all(np.isfinite(v)):
        raise EvaluationError(f"non-finite value in {what}")
    return v


def _is_zero(v) -> bool:
    if isinstance(v, Taylor):
        v = v.value
    return bool(np.any(np.asarray(v) == 0))


def _integral(arg: Expr, x0, table: SymbolTable):
    """Composite Simpson from ``table.base`` to each x0, at about ``table.step``."""

    def one(b: float) -> float:
        a = table.base
        if b == a:
            return 0.0
        n = max(2, int(np.ceil(abs(b - a) / table.step)))
        n += n % 2
        nodes = np.linspace(a, b, n + 1)
        vals = np.broadcast_to(evaluate(arg, nodes, table), nodes.shape)
        return float(simpson(vals, x=nodes))

    if isinstance(x0, Taylor):
        base_val = _integral(arg, x0.value, table)
        g = evaluate(arg, x0.truncate(x0.order - 1) if x0.order else x0, table)
        if not isinstance(g, Taylor):
            g = Taylor.constant(g, max(x0.order - 1, 0))
        return g.antiderivative(base_val).truncate(x0.order)
    if np.ndim(x0):
        flat = np.asarray(x0, dtype=float)
        return np.vectorize(one, otypes=[float])(flat)
    return one(float(x0))


def evaluate(e: Expr, x0, table: SymbolTable | None = None):
    """Value of ``e`` at ``x0`` (float, numpy array, or :class:`Taylor` jet)."""
    table = table or EMPTY
    return _check(_eval(e, x0, table), "result")


def _eval(e: Expr, x0, t: SymbolTable):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, X):
        return x0
    if isinstance(e, Sym):
        return _eval(t.derivative(e.name, e.order), x0, t)
    if isinstance(e, Param):
        if e.name not in t:
            raise EvaluationError(f"parameter {e.name!r} has no instantiation")
        return _eval(t.entries[e.name], x0, t)
    if isinstance(e, Add):
        out = _eval(e.terms[0], x0, t)
        for s in e.terms[1:]:
            out = out + _eval(s, x0, t)
        return out
    if isinstance(e, Neg):
        return -_eval(e.arg, x0, t)
    if isinstance(e, Mul):
        out = _eval(e.factors[0], x0, t)
        for f in e.factors[1:]:
            out = out * _eval(f, x0, t)
        return out
    if isinstance(e, Div):
        den = _eval(e.den, x0, t)
        if _is_zero(den):
            raise EvaluationError("division by zero")
        return _eval(e.num, x0, t) / den
    if isinstance(e, Pow):
        b = _eval(e.base, x0, t)
        if e.exp < 0:
            if _is_zero(b):
                raise EvaluationError("division by zero")
            if not isinstance(b, Taylor):
                b = np.asarray(b, dtype=float) if np.ndim(b) else float(b)
                return 1.0 / b ** (-e.exp)
        return b**e.exp
    if isinstance(e, Func):
        a = _eval(e.arg, x0, t)
        if e.name == "log":
            v = a.value if isinstance(a, Taylor) else a
            if np.any(np.asarray(v) <= 0):
                raise EvaluationError("log of a non-positive value")
        if e.name == "tan":
            v = a.value if isinstance(a, Taylor) else a
            if np.any(np.cos(v) == 0):
                raise EvaluationError("tan at a pole")
        if isinstance(a, Taylor):
            return getattr(a, e.name)()
        return getattr(np, e.name)(a)
    if isinstance(e, Int):
        return _integral(e.arg, x0, t)
    raise TypeError(f"cannot evaluate {e!r}")


def close(a: float, b: float, rel: float = REL_TOL) -> bool:
    """Relative comparison with a unit floor on the scale."""
    return abs(a - b) <= rel * max(abs(a), abs(b), 1.0)


def sample_points(
    exprs: Iterable[Expr],
    table: SymbolTable,
    trials: int,
    rng: np.random.Generator,
):
    """Yield ``trials`` (x0, values) pairs, resampling at poles."""
    exprs = list(exprs)
    lo, hi = table.interval
    produced = 0
    misses = 0
    while produced < trials:
        x0 = float(rng.uniform(lo, hi))
        try:
            values = [float(evaluate(e, x0, table)) for e in exprs]
        except (EvaluationError, ZeroDivisionError, FloatingPointError):
            misses += 1
            if misses > MAX_RESAMPLES:
                raise EvaluationError(
                    f"more than {MAX_RESAMPLES} consecutive sample points hit a pole"
                ) from None
            continue
        misses = 0
        produced += 1
        yield x0, values


def numeric_agreement(
    a: Expr,
    b: Expr,
    table: SymbolTable,
    trials: int,
    rng: np.random.Generator,
    rel: float = REL_TOL,
) -> tuple[bool, float]:
    """(all points agree, worst relative error) over random sample points."""
    worst = 0.0
    ok = True
    for _, (va, vb) in sample_points((a, b), table, trials, rng):
        err = abs(va - vb) / max(abs(va), abs(vb), 1.0)
        worst = max(worst, err)
        ok = ok and err <= rel
    return ok, worst


def equals(
    a: Expr,
    b: Expr,
    table: SymbolTable | None = None,
    trials: int = 8,
    rng: np.random.Generator | int | None = 0,
) -> bool:
    """Symbolic equality, falling back to random numeric testing.

    Matching canonical forms short-circuit. Otherwise both sides are
    evaluated at ``trials`` random points under ``table`` (a random table is
    drawn when none is given) and must agree to 1e-9 relative.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    a, b = as_expr(a), as_expr(b)
    if same(a, b):
        return True
    rng = np.random.default_rng(rng)
    if table is None:
        table = random_table([a, b], rng)
    ok, _ = numeric_agreement(a, b, table, trials, rng)
    return ok
