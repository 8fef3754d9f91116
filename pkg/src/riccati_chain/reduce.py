"""Gauge conjugation ``phi = u*v`` and removal of the subleading derivative."""

from __future__ import annotations

from dataclasses import dataclass

from .canon import from_poly, is_zero, normalize, padd, pmul, to_poly
from .chain import LinearODE, to_text_ode
from .expr import Const, Expr, Func, Int, as_expr, differentiate, mul, to_text


class ReductionError(RuntimeError):
    """The depressing gauge failed to cancel the subleading coefficient."""


@dataclass(frozen=True)
class GaugeFactor:
    """``u = exp(Int(logderiv))``, so that ``u'/u = logderiv``."""

    logderiv: Expr

    @property
    def factor(self) -> Expr:
        return normalize(Func("exp", Int(self.logderiv)))

    def __str__(self) -> str:
        return to_text(self.factor)


@dataclass(frozen=True)
class ReducedODE:
    """Depressed equation for v with ``coeffs[order-1]`` identically zero."""

    coeffs: tuple[Expr, ...]
    gauge: GaugeFactor
    source: LinearODE

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def as_linear(self) -> LinearODE:
        return LinearODE(self.coeffs)

    def depressed_terms(self) -> list[tuple[int, Expr]]:
        """(derivative order, coefficient) from v^(M-2) down to v."""
        return [(k, self.coeffs[k]) for k in range(self.order - 2, -1, -1)]

    def __str__(self) -> str:
        return to_text_ode(self.coeffs, "v")


def conjugate(ode: LinearODE, m: Expr | str) -> list[Expr]:
    """Coefficients of the equation for v when ``phi = exp(Int(m)) * v``.

    Uses ``phi^(k) = u * (D + m)^k v``. ``out[j]`` multiplies ``v^(j)`` for
    ``j < order``; the leading coefficient is 1 and is not returned.
    """
    m = to_poly(as_expr(m))
    M = ode.order
    betas = [to_poly(c) for c in ode.coeffs] + [{(): 1}]
    op: list[dict] = [{(): 1}]  # (D + m)^0
    total: list[dict] = [{} for _ in range(M + 1)]
    for k in range(M + 1):
        for j, cj in enumerate(op):
            total[j] = padd(total[j], pmul(betas[k], cj))
        if k == M:
            break
        nxt: list[dict] = [{} for _ in range(len(op) + 1)]
        for j, cj in enumerate(op):
            nxt[j] = padd(nxt[j], to_poly(differentiate(from_poly(cj))))
            nxt[j] = padd(nxt[j], pmul(m, cj))
            nxt[j + 1] = padd(nxt[j + 1], cj)
        op = nxt
    lead = from_poly(total[M])
    if not is_zero(lead - Const(1)):
        raise ReductionError(f"conjugated equation is not monic: {to_text(lead)}")
    return [from_poly(t) for t in total[:M]]


def gauge_of(ode: LinearODE) -> GaugeFactor:
    """The gauge that removes the coefficient of v^(M-1): ``m = -beta_{M-1}/M``."""
    if ode.order < 2:
        raise ValueError("depressing needs order at least 2")
    return GaugeFactor(normalize(mul(Const(-1) / ode.order, ode.subleading)))


def depress(ode: LinearODE) -> ReducedODE:
    gauge = gauge_of(ode)
    coeffs = conjugate(ode, gauge.logderiv)
    if not is_zero(coeffs[-1]):
        raise ReductionError(f"subleading coefficient survived: {to_text(coeffs[-1])}")
    return ReducedODE(tuple(coeffs), gauge, ode)
