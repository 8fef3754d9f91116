"""Schwarzian derivatives, Moebius maps and proportionality of expressions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .canon import coefficient_ratio, is_zero, normalize
from .evaluate import SymbolTable, evaluate, numeric_agreement, random_table
from .expr import Const, Expr, add, as_expr, differentiate, div, mul, neg, power
from .grid import GridFn
from .taylor import Taylor

CRITICAL_TOL = 1e-12
PROPORTIONALITY_TRIALS = 8


class CriticalPointError(ValueError):
    """f' vanishes (numerically) where the Schwarzian was requested."""


def schwarzian_of_jet(jet: Taylor):
    """``f'''/f' - (3/2) (f''/f')^2`` from a jet of order at least 3."""
    if jet.order < 3:
        raise ValueError("the Schwarzian needs a jet of order 3")
    d1, d2, d3 = jet.derivative(1), jet.derivative(2), jet.derivative(3)
    if np.any(np.abs(d1) < CRITICAL_TOL):
        raise CriticalPointError("f' vanishes at the evaluation point")
    r = d2 / d1
    return d3 / d1 - 1.5 * r * r


Evaluable = Union[Expr, str, GridFn, Taylor, Callable[[Taylor], Taylor]]


def jet_of(f: Evaluable, x0, table: SymbolTable | None = None, order: int = 3) -> Taylor:
    if isinstance(f, Taylor):
        return f
    if isinstance(f, GridFn):
        return f.jets(order, at=x0)
    if isinstance(f, (Expr, str)):
        jet = evaluate(as_expr(f), Taylor.variable(x0, order), table)
        return jet if isinstance(jet, Taylor) else Taylor.constant(jet, order)
    if callable(f):
        return f(Taylor.variable(x0, order))
    raise TypeError(f"cannot take jets of {type(f).__name__}")


def schwarzian_at(f: Evaluable, x0, table: SymbolTable | None = None):
    """Schwarzian of ``f`` at ``x0`` by order-3 Taylor arithmetic.

    ``f`` may be an expression, a :class:`GridFn` (jets from cubic splines),
    or a callable mapping a Taylor jet to a Taylor jet. ``x0`` may be an array.
    """
    return schwarzian_of_jet(jet_of(f, x0, table))


def sl_schwarzian(p: Expr | str, q: Expr | str) -> Expr:
    """``-p^2/2 + 2q - p'``: the Schwarzian of a ratio of independent solutions
    of ``psi'' + p psi' + q psi = 0``."""
    p, q = as_expr(p), as_expr(q)
    return normalize(add(mul(Const(Fraction(-1, 2)), power(p, 2)), mul(Const(2), q), neg(differentiate(p))))


@dataclass(frozen=True)
class Mobius:
    a: Fraction | float
    b: Fraction | float
    c: Fraction | float
    d: Fraction | float

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("Moebius map with zero determinant")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def compose(self, other: Mobius) -> Mobius:
        """``self o other``."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


def _const(v) -> Expr:
    return Const(Fraction(v))


def mobius_apply(m: Mobius, f):
    """``(a f + b)/(c f + d)`` for expressions, grid functions, jets, callables or numbers."""
    if isinstance(f, str):
        f = as_expr(f)
    if isinstance(f, Expr):
        num = add(mul(_const(m.a), f), _const(m.b))
        den = add(mul(_const(m.c), f), _const(m.d))
        if is_zero(den):
            raise ZeroDivisionError("Moebius denominator vanishes identically")
        return div(num, den)
    a, b, c, d = (float(v) for v in (m.a, m.b, m.c, m.d))
    if isinstance(f, GridFn):
        den = c * f.values + d
        bad = np.flatnonzero(den == 0)
        if bad.size:
            raise ZeroDivisionError(f"Moebius denominator vanishes at node {int(bad[0])}")
        return f.map_values(lambda t: (a * t + b) / (c * t + d))
    if isinstance(f, Taylor):
        return (a * f + b) / (c * f + d)
    if callable(f):
        return lambda t: mobius_apply(m, f(t))
    f = np.asarray(f, dtype=float)
    den = c * f + d
    if np.any(den == 0):
        raise ZeroDivisionError("Moebius denominator vanishes")
    return (a * f + b) / den


def proportionality(
    a: Expr | str,
    b: Expr | str,
    table: SymbolTable | None = None,
    trials: int = PROPORTIONALITY_TRIALS,
    rng: np.random.Generator | int | None = 0,
) -> Fraction | None:
    """Exact rational ``k`` with ``a = k*b``, or None.

    The constant is read off the canonical forms and then confirmed
    numerically at ``trials`` random points (1e-9 relative).
    """
    a, b = as_expr(a), as_expr(b)
    if is_zero(b):
        raise ValueError("reference expression is identically zero")
    k = coefficient_ratio(a, b)
    if k is None:
        return None
    rng = np.random.default_rng(rng)
    table = table or random_table([a, b], rng)
    ok, worst = numeric_agreement(a, mul(Const(k), b), table, trials, rng)
    if not ok:
        raise ArithmeticError(
            f"canonical forms give ratio {k} but numeric check disagrees (rel err {worst:.3g})"
        )
    return k
