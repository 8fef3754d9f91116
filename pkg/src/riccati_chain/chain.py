"""Riccati chain equations and their Cole-Hopf linearizations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .canon import from_poly, normalize, same, to_poly
from .evaluate import SymbolTable, evaluate
from .expr import Const, Expr, Sym, as_expr, div, mul, nth_derivative, substitute, to_text
from .jet import JET_NAME, MAX_CHAIN_ORDER, ChainParams, JetPoly, iterate_L

PHI = "phi"


@dataclass(frozen=True)
class RiccatiEq:
    """The equation ``lhs = 0``."""

    lhs: JetPoly
    params: ChainParams

    def __str__(self) -> str:
        return f"{self.lhs} = 0"


@dataclass(frozen=True)
class LinearODE:
    """Monic ``phi^(m) + sum_i coeffs[i]*phi^(i) = 0`` with ``m = len(coeffs)``."""

    coeffs: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a linear ODE needs order at least 1")
        object.__setattr__(self, "coeffs", tuple(normalize(as_expr(c)) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def subleading(self) -> Expr:
        return self.coeffs[-1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearODE):
            return NotImplemented
        return self.order == other.order and all(
            same(a, b) for a, b in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __str__(self) -> str:
        return to_text_ode(self.coeffs, PHI)

    def apply(self, derivs: Sequence, x0, table: SymbolTable | None = None):
        """Residual for samples ``derivs[k] = phi^(k)``, k = 0..order."""
        total = np.asarray(derivs[self.order], dtype=float)
        for i, c in enumerate(self.coeffs):
            total = total + evaluate(c, x0, table) * np.asarray(derivs[i])
        return total

    def symbolic_apply(self, f: Expr) -> Expr:
        out: Expr = nth_derivative(f, self.order)
        for i, c in enumerate(self.coeffs):
            out = out + c * nth_derivative(f, i)
        return normalize(out)


def to_text_ode(coeffs: Sequence[Expr], var: str) -> str:
    """``var^(m) + ... = 0`` in the expression grammar."""
    m = len(coeffs)
    parts = [f"{var}{chr(39) * m}(x)"]
    for i in range(m - 1, -1, -1):
        c = normalize(coeffs[i])
        if same(c, Const(0)):
            continue
        ctext = to_text(c)
        if " " in ctext:
            ctext = f"({ctext})"
        term = f"{var}{chr(39) * i}(x)"
        if same(c, Const(1)):
            parts.append(" + " + term)
        elif ctext.startswith("-") and " " not in ctext:
            parts.append(f" - {ctext[1:]}*{term}")
        else:
            parts.append(f" + {ctext}*{term}")
    return "".join(parts) + " = 0"


def build_chain(params: ChainParams, max_order: int = MAX_CHAIN_ORDER) -> RiccatiEq:
    """Expanded ``L^n w + sum_{i=1..n} a_i L^(i-1) w + a_0`` with ``L = d/dx + c w``."""
    n = params.n
    if n > max_order:
        raise ValueError(f"chain order {n} exceeds the cap of {max_order}")
    powers = iterate_L(params.c, n)
    lhs = powers[n] + JetPoly.const(params.alphas[0])
    for i in range(1, n + 1):
        lhs = lhs + JetPoly.const(params.alphas[i]) * powers[i - 1]
    return RiccatiEq(lhs, params)


def linearize(params: ChainParams) -> LinearODE:
    """``phi^(n+1) + sum_{i=1..n} a_i phi^(i) + c a_0 phi = 0``."""
    return LinearODE((mul(params.c, params.alphas[0]),) + params.alphas[1:])


def cole_hopf_image(eq: RiccatiEq) -> Expr:
    """``c*phi * lhs`` with ``w = phi'/(c*phi)`` substituted, normalized.

    For a chain equation this is the linearized operator applied to
    ``phi(x)``.
    """
    c = eq.params.c
    phi = Sym(PHI)
    w = div(Sym(PHI, 1), mul(c, phi))
    image = substitute(eq.lhs.to_expr(), {JET_NAME: w})
    return normalize(mul(c, phi, image))


def linear_from_image(image: Expr, order: int) -> LinearODE:
    """Read a monic linear ODE back out of an expression linear in phi^(k)."""

    buckets: dict[int, dict] = {}
    for mono, coef in to_poly(image).items():
        orders = [(a.order, e) for a, e in mono if isinstance(a, Sym) and a.name == PHI]
        if len(orders) != 1 or orders[0][1] != 1:
            raise ValueError("expression is not linear in phi")
        k = orders[0][0]
        rest = tuple((a, e) for a, e in mono if not (isinstance(a, Sym) and a.name == PHI))
        buckets.setdefault(k, {})[rest] = coef
    if set(buckets) - set(range(order + 1)):
        raise ValueError("derivative order exceeds the stated order")
    lead = from_poly(buckets.get(order, {}))
    if not same(lead, Const(1)):
        raise ValueError(f"leading coefficient is {to_text(lead)}, not 1")
    return LinearODE(tuple(from_poly(buckets.get(i, {})) for i in range(order)))
