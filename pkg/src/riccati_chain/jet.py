"""Differential polynomials in the jet variables w, w', w'', ...

A :class:`JetPoly` maps exponent tuples ``(e0, e1, ..., ek)``, meaning
``w^e0 * w'^e1 * ... * w^(k)^ek``, to coefficient expressions in ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import canon
from .canon import from_poly, padd, pmul, pscale, to_poly
from .evaluate import SymbolTable, evaluate
from .expr import Const, Expr, Param, Sym, alpha, as_expr, differentiate, free_names, to_text
from .grid import GridFn
from .taylor import Taylor

JET_NAME = "w"
MAX_CHAIN_ORDER = 8

Exponents = tuple  # tuple[int, ...] without trailing zeros


def _strip(m: Sequence[int]) -> Exponents:
    m = list(m)
    while m and m[-1] == 0:
        m.pop()
    return tuple(m)


def _shift(m: Exponents, k: int, delta: int) -> Exponents:
    m = list(m) + [0] * max(0, k + 1 - len(m))
    m[k] += delta
    return _strip(m)


def _mono_mul(a: Exponents, b: Exponents) -> Exponents:
    n = max(len(a), len(b))
    return _strip([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _jet_var_text(k: int) -> str:
    return JET_NAME + "'" * k


class JetPoly:
    """Polynomial in jet variables with expression coefficients; immutable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], Expr | int | str] | None = None) -> None:
        polys: dict = {}
        for m, coef in (terms or {}).items():
            m = _strip(m)
            polys[m] = padd(polys.get(m, {}), to_poly(as_expr(coef)))
        object.__setattr__(self, "_terms", _from_polys(polys))

    def __setattr__(self, name, value):
        raise AttributeError("JetPoly is immutable")

    @classmethod
    def _raw(cls, polys: Mapping) -> JetPoly:
        out = cls.__new__(cls)
        object.__setattr__(out, "_terms", _from_polys(polys))
        return out

    @classmethod
    def var(cls, k: int = 0) -> JetPoly:
        """The jet variable w^(k)."""
        return cls({_shift((), k, 1): 1})

    @classmethod
    def const(cls, coef: Expr | int | str) -> JetPoly:
        return cls({(): coef})

    @classmethod
    def from_expr(cls, e: Expr | str) -> JetPoly:
        """Read an expression in which ``w(x), w'(x), ...`` play the jet variables."""
        polys: dict = {}
        for mono, c in to_poly(as_expr(e)).items():
            jet: Exponents = ()
            rest = []
            for atom, p in mono:
                if isinstance(atom, Sym) and atom.name == JET_NAME:
                    if p < 0:
                        raise ValueError("negative power of a jet variable")
                    jet = _shift(jet, atom.order, p)
                else:
                    if ("sym", JET_NAME) in free_names(atom):
                        raise ValueError(f"jet variable inside {to_text(atom)} is not polynomial")
                    rest.append((atom, p))
            polys[jet] = padd(polys.get(jet, {}), {tuple(rest): c})
        return cls._raw(polys)

    @property
    def terms(self) -> dict[Exponents, Expr]:
        return dict(self._terms)

    def __iter__(self):
        return iter(self.sorted_terms())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, m: Sequence[int]) -> Expr:
        return self._terms.get(_strip(m), Const(0))

    def _polys(self) -> dict:
        return {m: to_poly(c) for m, c in self._terms.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self._polys() == other._polys()

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other) -> JetPoly:
        other = _lift(other)
        polys = self._polys()
        for m, p in other._polys().items():
            polys[m] = padd(polys.get(m, {}), p)
        return JetPoly._raw(polys)

    __radd__ = __add__

    def __neg__(self) -> JetPoly:
        return JetPoly._raw({m: pscale(p, -1) for m, p in self._polys().items()})

    def __sub__(self, other) -> JetPoly:
        return self + (-_lift(other))

    def __rsub__(self, other) -> JetPoly:
        return _lift(other) - self

    def __mul__(self, other) -> JetPoly:
        other = _lift(other)
        polys: dict = {}
        for m1, p1 in self._polys().items():
            for m2, p2 in other._polys().items():
                m = _mono_mul(m1, m2)
                polys[m] = padd(polys.get(m, {}), pmul(p1, p2))
        return JetPoly._raw(polys)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> JetPoly:
        out = JetPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    @property
    def order(self) -> int:
        """Highest jet order present; -1 for a polynomial free of jet variables."""
        return max((len(m) - 1 for m in self._terms), default=-1)

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def sorted_terms(self) -> list[tuple[Exponents, Expr]]:
        def key(m):
            return (len(m) - 1,) + tuple(reversed(m))

        return [(m, self._terms[m]) for m in sorted(self._terms, key=key, reverse=True)]

    def to_expr(self) -> Expr:
        e: Expr = Const(0)
        for m, coef in self.sorted_terms():
            t = coef
            for k, p in enumerate(m):
                if p:
                    t = t * Sym(JET_NAME, k) ** p
            e = e + t
        return canon.normalize(e)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, coef in self.sorted_terms():
            jets = "*".join(
                _jet_var_text(k) + (f"^{p}" if p > 1 else "") for k, p in enumerate(m) if p
            )
            ctext = to_text(coef)
            if canon.same(coef, Const(1)) and jets:
                text = jets
            elif canon.same(coef, Const(-1)) and jets:
                text = "-" + jets
            elif not jets:
                text = ctext
            else:
                if len(to_poly(coef)) > 1:
                    ctext = f"({ctext})"
                text = f"{ctext}*{jets}"
            parts.append(text)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"JetPoly({str(self)!r})"

    def evaluate(self, jets: Sequence, x0, table: SymbolTable | None = None):
        """Value with ``jets[k]`` substituted for w^(k)."""
        total = 0.0
        for m, coef in self._terms.items():
            term = evaluate(coef, x0, table)
            for k, p in enumerate(m):
                if p:
                    term = term * np.asarray(jets[k]) ** p
            total = total + term
        return total


def _from_polys(polys: Mapping) -> dict[Exponents, Expr]:
    return {m: from_poly(p) for m, p in polys.items() if p}


def _lift(other) -> JetPoly:
    return other if isinstance(other, JetPoly) else JetPoly.const(as_expr(other))


def total_derivative(P: JetPoly) -> JetPoly:
    """d/dx acting on coefficients and, by the chain rule, on each w^(k)."""
    polys: dict = {}
    for m, coef in P.terms.items():
        dc = to_poly(differentiate(coef))
        if dc:
            polys[m] = padd(polys.get(m, {}), dc)
        cp = to_poly(coef)
        for k, p in enumerate(m):
            if p:
                target = _shift(_shift(m, k, -1), k + 1, 1)
                polys[target] = padd(polys.get(target, {}), pscale(cp, p))
    return JetPoly._raw(polys)


def apply_L(P: JetPoly, c) -> JetPoly:
    """The chain operator ``d/dx + c*w`` applied to ``P``."""
    return total_derivative(P) + JetPoly({(1,): as_expr(c)}) * P


# -- chain parameters -------------------------------------------------------


def _as_chain_constant(c) -> Expr:
    if isinstance(c, str):
        c = as_expr(c)
    if isinstance(c, Expr):
        if not isinstance(c, (Const, Param)):
            raise ValueError("the chain constant must be a rational number or a parameter")
        e = c
    else:
        e = Const(Fraction(c))
    if isinstance(e, Const) and e.value == 0:
        raise ValueError("the chain constant c must be nonzero")
    return e


@dataclass(frozen=True)
class ChainParams:
    """Order ``n``, constant ``c`` and coefficients ``alphas[0..n]``."""

    n: int
    c: Expr
    alphas: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"chain order must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "c", _as_chain_constant(self.c))
        alphas = tuple(as_expr(a) for a in self.alphas)
        if len(alphas) != self.n + 1:
            raise ValueError(f"order {self.n} needs {self.n + 1} coefficients, got {len(alphas)}")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def opaque(cls, n: int, c="c") -> ChainParams:
        return cls(n, c, tuple(alpha(i) for i in range(n + 1)))

    def table_names(self) -> set:
        names = set()
        for e in (self.c,) + self.alphas:
            names |= free_names(e)
        return names


# -- Cole-Hopf check --------------------------------------------------------


class SingularityError(ValueError):
    def __init__(self, node: int, x: float) -> None:
        super().__init__(f"phi vanishes or changes sign at node {node} (x = {x:.6g})")
        self.node = node
        self.x = x


_STENCILS: dict[int, np.ndarray] = {}


def central_stencil(k: int) -> np.ndarray:
    """Weights of the narrowest second-order central stencil for the k-th derivative."""
    if k not in _STENCILS:
        r = (k + 1) // 2
        offsets = np.arange(-r, r + 1, dtype=float)
        A = np.vander(offsets, increasing=True).T
        rhs = np.zeros(2 * r + 1)
        rhs[k] = float(np.prod(np.arange(1, k + 1)))
        _STENCILS[k] = np.linalg.solve(A, rhs)
    return _STENCILS[k]


def central_difference(y: np.ndarray, k: int, h: float) -> np.ndarray:
    """k-th derivative of samples ``y``; NaN where the stencil does not fit."""
    if k == 0:
        return np.asarray(y, dtype=float).copy()
    w = central_stencil(k)
    r = len(w) // 2
    out = np.full(len(y), np.nan)
    if len(y) > 2 * r:
        acc = np.zeros(len(y) - 2 * r)
        for j, wj in enumerate(w):
            acc += wj * y[j : len(y) - 2 * r + j]
        out[r : len(y) - r] = acc / h**k
    return out


@dataclass(frozen=True)
class ResidualProfile:
    x: np.ndarray
    residual: np.ndarray  # NaN outside the usable interior
    masked: np.ndarray  # nodes dropped because phi is too small there

    @property
    def max(self) -> float:
        usable = np.isfinite(self.residual) & ~self.masked
        if not usable.any():
            raise ValueError("no usable interior nodes")
        return float(np.max(np.abs(self.residual[usable])))


def _check_phi(phi: GridFn) -> None:
    v = phi.values
    zero = np.flatnonzero(v == 0)
    flips = np.flatnonzero(np.sign(v[1:]) * np.sign(v[:-1]) < 0) + 1
    bad = np.concatenate([zero, flips])
    if bad.size:
        i = int(bad.min())
        raise SingularityError(i, float(phi.x[i]))


def omega_samples(phi: GridFn, c: float, order: int) -> list[np.ndarray]:
    """w, w', ..., w^(order) at the nodes for w = phi'/(c*phi).

    Orders covered by the sampled derivatives of phi are computed exactly by
    jet division. Plain samples (phi, or phi and phi') fall back on central
    differences of w for the remaining orders.
    """
    _check_phi(phi)
    top = len(phi.derivs) - 1
    if top == 0:
        w = central_difference(phi.values, 1, phi.step) / (c * phi.values)
        return [w] + [central_difference(w, k, phi.step) for k in range(1, order + 1)]
    exact = min(order, top - 1)
    jet = Taylor.from_derivatives(phi.derivs[: exact + 2])
    head = jet.coeffs[1:]
    wjet = Taylor([k * a for k, a in enumerate(head, start=1)]) / (c * jet.truncate(exact))
    out = wjet.derivatives()
    last = out[-1]
    for extra in range(1, order - exact + 1):
        out.append(central_difference(last, extra, phi.step))
    return out


def cole_hopf_residuals(
    P: JetPoly,
    c,
    phi: GridFn,
    table: SymbolTable | None = None,
    floor: float = 1e-6,
) -> ResidualProfile:
    cval = float(evaluate(as_expr(c), 0.0, table))
    jets = omega_samples(phi, cval, max(P.order, 0))
    xs = phi.x
    interior = np.all([np.isfinite(j) for j in jets], axis=0)
    small = np.abs(phi.values) < floor * np.max(np.abs(phi.values))
    # drop nodes whose stencils reach a masked node
    fd_orders = max(P.order - (len(phi.derivs) - 2), 0) if len(phi.derivs) > 1 else P.order
    reach = len(central_stencil(max(fd_orders, 1))) // 2 + (len(phi.derivs) == 1)
    masked = np.convolve(small.astype(float), np.ones(2 * reach + 1), mode="same") > 0
    residual = np.full(len(xs), np.nan)
    idx = np.flatnonzero(interior)
    if idx.size:
        residual[idx] = P.evaluate([j[idx] for j in jets], xs[idx], table)
    return ResidualProfile(xs, residual, masked)


def cole_hopf_check(
    P: JetPoly,
    c,
    phi: GridFn,
    table: SymbolTable | None = None,
    floor: float = 1e-6,
) -> float:
    """Max |P| over interior nodes with w = phi'/(c*phi) substituted."""
    return cole_hopf_residuals(P, c, phi, table, floor).max


def iterate_L(c, k: int) -> list[JetPoly]:
    """[w, L w, L^2 w, ..., L^k w]."""
    out = [JetPoly.var(0)]
    for _ in range(k):
        out.append(apply_L(out[-1], c))
    return out

