"""Canonical polynomial form of expressions.

An expression is expanded into a finite sum of monomials with exact rational
coefficients. A monomial is a product of *atoms* raised to integer
(possibly negative) powers. Atoms are ``x``, opaque symbols, parameters,
``Int(...)`` and elementary-function applications whose arguments are
themselves normalized, and reciprocals of multi-term polynomials that do not
divide exactly.

Within that fragment two expressions are equal iff their canonical forms are
identical. Nothing beyond ring arithmetic is attempted: ``sin(x)^2 +
cos(x)^2`` stays as it is.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .expr import (
    ONE,
    ZERO,
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
    to_text,
)

Monomial = tuple  # tuple[tuple[Expr, int], ...], sorted by atom_key
Poly = Mapping[Monomial, Fraction]


def atom_key(a: Expr) -> tuple:
    cache = a._cache
    key = cache.get("ak")
    if key is None:
        if isinstance(a, Param):
            key = (0, a.name, 0, "")
        elif isinstance(a, Sym):
            stem = a.name.rstrip("0123456789")
            num = a.name[len(stem) :]
            key = (1, stem, int(num) if num else -1, a.order)
        elif isinstance(a, X):
            key = (2, "", 0, 0)
        elif isinstance(a, Func):
            key = (3, a.name, 0, to_text(a.arg))
        elif isinstance(a, Int):
            key = (4, "", 0, to_text(a.arg))
        else:
            key = (5, "", 0, to_text(a))
        cache["ak"] = key
    return key


def _mono(powers: dict) -> Monomial:
    return tuple(sorted(((a, e) for a, e in powers.items() if e != 0), key=lambda t: atom_key(t[0])))


def const_poly(v) -> dict:
    v = Fraction(v)
    return {(): v} if v != 0 else {}


def atom_poly(a: Expr, e: int = 1) -> dict:
    return {((a, e),): Fraction(1)}


def padd(p: Poly, q: Poly) -> dict:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) + c
        if s == 0:
            out.pop(m, None)
        else:
            out[m] = s
    return out


def pscale(p: Poly, k) -> dict:
    k = Fraction(k)
    if k == 0:
        return {}
    return {m: c * k for m, c in p.items()}


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    powers = dict(m1)
    for a, e in m2:
        powers[a] = powers.get(a, 0) + e
    return _mono(powers)


def pmul(p: Poly, q: Poly) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            s = out.get(m, 0) + c1 * c2
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return out


def ppow(p: Poly, n: int) -> dict:
    if n < 0:
        return ppow(pinverse(p), -n)
    result: dict = {(): Fraction(1)}
    base = dict(p)
    while n:
        if n & 1:
            result = pmul(result, base)
        n >>= 1
        if n:
            base = pmul(base, base)
    return result


def degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _order_vector(m: Monomial, atoms: list) -> tuple:
    powers = dict(m)
    vec = tuple(powers.get(a, 0) for a in atoms)
    return (sum(vec),) + vec


def exact_divide(p: Poly, d: Poly) -> dict | None:
    """``p / d`` when ``d`` divides ``p`` in the polynomial ring, else None."""
    if not d:
        raise ZeroDivisionError("division by the zero polynomial")
    if any(e < 0 for m in list(p) + list(d) for _, e in m):
        return None
    atoms = sorted({a for m in list(p) + list(d) for a, _ in m}, key=atom_key)
    key = lambda m: _order_vector(m, atoms)  # noqa: E731
    lead_d = max(d, key=key)
    lead_dc = d[lead_d]
    rem = dict(p)
    quot: dict = {}
    while rem:
        lead = max(rem, key=key)
        powers = dict(lead)
        for a, e in lead_d:
            powers[a] = powers.get(a, 0) - e
            if powers[a] < 0:
                return None
        m = _mono(powers)
        c = rem[lead] / lead_dc
        quot = padd(quot, {m: c})
        rem = padd(rem, pmul({m: -c}, d))
    return quot


def _leading(p: Poly) -> Monomial:
    return min(p, key=_term_sort_key)


def pinverse(p: Poly) -> dict:
    if not p:
        raise ZeroDivisionError("division by an expression that normalizes to zero")
    if len(p) == 1:
        (m, c), = p.items()
        return {tuple((a, -e) for a, e in m): 1 / c}
    lead_c = p[_leading(p)]
    primitive = pscale(p, 1 / lead_c)
    recip = Pow(from_poly(primitive), -1)
    recip._cache["nf"] = None  # marker: this node is an atom, see to_poly
    return {((recip, 1),): 1 / lead_c}


def _inverse_of(d: Expr) -> dict:
    # invert factor by factor so that 1/(x+3)^2 and (x+3)^-2 agree
    if isinstance(d, Mul):
        out = {(): Fraction(1)}
        for f in d.factors:
            out = pmul(out, _inverse_of(f))
        return out
    if isinstance(d, Pow):
        if d.exp > 0:
            return ppow(_inverse_of(d.base), d.exp)
        return ppow(to_poly(d.base), -d.exp)
    if isinstance(d, Neg):
        return pscale(_inverse_of(d.arg), -1)
    if isinstance(d, Div):
        return pmul(to_poly(d.den), _inverse_of(d.num))
    return pinverse(to_poly(d))


def _int_poly(arg: Poly) -> dict:
    # Int is linear; constants and parameters are pulled outside
    out: dict = {}
    for m, c in arg.items():
        outside = tuple((a, e) for a, e in m if isinstance(a, Param))
        inside = tuple((a, e) for a, e in m if not isinstance(a, Param))
        atom = Int(from_poly({inside: Fraction(1)}))
        out = padd(out, {mono_mul(outside, ((atom, 1),)): c})
    return out


_FOLD_AT_ZERO = {"sin": 0, "tan": 0, "cos": 1, "exp": 1}


def to_poly(e: Expr) -> Poly:
    cache = e._cache
    if "nf" in cache:
        cached = cache["nf"]
        if cached is None:  # reciprocal atom
            cached = atom_poly(e)
            cache["nf"] = cached
        return cached
    out = _to_poly(e)
    cache["nf"] = out
    return out


def _to_poly(e: Expr) -> dict:
    if isinstance(e, Const):
        return const_poly(e.value)
    if isinstance(e, (X, Sym, Param)):
        return atom_poly(e)
    if isinstance(e, Add):
        out: dict = {}
        for t in e.terms:
            out = padd(out, to_poly(t))
        return out
    if isinstance(e, Neg):
        return pscale(to_poly(e.arg), -1)
    if isinstance(e, Mul):
        out = {(): Fraction(1)}
        for f in e.factors:
            out = pmul(out, to_poly(f))
            if not out:
                break
        return out
    if isinstance(e, Div):
        num, den = to_poly(e.num), to_poly(e.den)
        if not den:
            raise ZeroDivisionError(f"denominator {to_text(e.den)} normalizes to zero")
        if len(den) > 1:
            q = exact_divide(num, den)
            if q is not None:
                return q
            return pmul(num, _inverse_of(e.den))
        return pmul(num, pinverse(den))
    if isinstance(e, Pow):
        base = to_poly(e.base)
        if e.exp < 0 and len(base) > 1:
            return ppow(pinverse(base), -e.exp)
        return ppow(base, e.exp)
    if isinstance(e, Func):
        arg = to_poly(e.arg)
        if not arg:
            if e.name == "log":
                raise ValueError("log(0) is undefined")
            return const_poly(_FOLD_AT_ZERO[e.name])
        if e.name == "log" and arg == {(): Fraction(1)}:
            return {}
        return atom_poly(Func(e.name, from_poly(arg)))
    if isinstance(e, Int):
        arg = to_poly(e.arg)
        return _int_poly(arg) if arg else {}
    raise TypeError(f"cannot normalize {e!r}")


def _term_sort_key(m: Monomial) -> tuple:
    return (-sum(abs(e) for _, e in m), tuple((atom_key(a), -e) for a, e in m))


def _is_recip(a: Expr) -> bool:
    return isinstance(a, Pow) and a.exp == -1


def _term_expr(m: Monomial, c: Fraction, first: bool) -> Expr:
    num: list[Expr] = []
    den: list[Expr] = []
    for a, e in m:
        if _is_recip(a):
            num.append(a.base if e == -1 else Pow(a.base, -e))
        elif e > 0:
            num.append(a if e == 1 else Pow(a, e))
        else:
            den.append(a if e == -1 else Pow(a, -e))
    if not num and not den:
        return Const(c)
    negate = False
    if c < 0 and not first:
        c, negate = -c, True
    if c == -1 and num:
        num[0] = Neg(num[0])
        c = Fraction(1)
    factors = ([Const(c)] if c != 1 or not num else []) + num
    top: Expr = factors[0] if len(factors) == 1 else Mul(factors)
    if den:
        top = Div(top, den[0] if len(den) == 1 else Mul(den))
    return Neg(top) if negate else top


def from_poly(p: Poly) -> Expr:
    if not p:
        return ZERO
    monos = sorted(p, key=_term_sort_key)
    terms = [_term_expr(m, p[m], i == 0) for i, m in enumerate(monos)]
    if len(terms) == 1:
        out = terms[0]
    else:
        out = Add(terms)
    out._cache["nf"] = dict(p)
    return out


def normalize(e: Expr) -> Expr:
    """Canonical expression for ``e``; idempotent."""
    cache = e._cache
    out = cache.get("normal")
    if out is None:
        out = from_poly(to_poly(e))
        cache["normal"] = out
        out._cache["normal"] = out
    return out


def is_zero(e: Expr) -> bool:
    return not to_poly(e)


def same(a: Expr, b: Expr) -> bool:
    """Symbolic equality within the polynomial fragment."""
    return to_poly(a) == to_poly(b)


def coefficient_ratio(a: Expr, b: Expr) -> Fraction | None:
    """Exact rational ``k`` with ``a == k*b`` as canonical forms, else None."""
    pa, pb = to_poly(a), to_poly(b)
    if not pb:
        raise ZeroDivisionError("reference expression is identically zero")
    if set(pa) != set(pb):
        return None
    ratio = None
    for m, c in pb.items():
        r = pa[m] / c
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio


__all__ = [
    "ONE",
    "ZERO",
    "coefficient_ratio",
    "from_poly",
    "is_zero",
    "normalize",
    "same",
    "to_poly",
]
