"""Expression trees for scalar functions of the independent variable ``x``.

Nodes are immutable and hashable. Two families of leaves matter for the
symbolic work:

* ``Sym(name, order)`` is an opaque function of ``x`` together with a formal
  derivative order, printed ``a2''(x)``.
* ``Param(name)`` is an opaque constant (the chain constant ``c``); its
  derivative is zero.

Everything else is closed form: rational constants, ``x``, elementary
functions, integer powers and the antiderivative node ``Int(e)``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

FUNCTIONS = ("sin", "cos", "tan", "exp", "log")


class Expr:
    __slots__ = ("_hash", "_cache")

    # subclasses set this
    _fields: tuple[str, ...] = ()

    def _key(self) -> tuple:
        return (type(self).__name__,) + tuple(getattr(self, f) for f in self._fields)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash(self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _init(self, **fields) -> None:
        for k, v in fields.items():
            object.__setattr__(self, k, v)
        object.__setattr__(self, "_cache", {})

    def __repr__(self) -> str:
        args = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({args})"

    def __str__(self) -> str:
        return to_text(self)

    # arithmetic sugar; builds simplified trees
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return power(self, n)


class Const(Expr):
    __slots__ = ("value",)
    _fields = ("value",)

    def __init__(self, value) -> None:
        if isinstance(value, float):
            raise TypeError("floating-point constants are not allowed; pass a Fraction")
        self._init(value=Fraction(value))


class X(Expr):
    __slots__ = ()
    _fields = ()

    def __init__(self) -> None:
        self._init()


class Sym(Expr):
    """Opaque function ``name`` differentiated ``order`` times."""

    __slots__ = ("name", "order")
    _fields = ("name", "order")

    def __init__(self, name: str, order: int = 0) -> None:
        if not isinstance(order, int) or order < 0:
            raise ValueError(f"derivative order must be a non-negative integer, got {order!r}")
        self._init(name=name, order=order)


class Param(Expr):
    """Opaque constant."""

    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: str) -> None:
        self._init(name=name)


class Func(Expr):
    __slots__ = ("name", "arg")
    _fields = ("name", "arg")

    def __init__(self, name: str, arg: Expr) -> None:
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self._init(name=name, arg=arg)


class Int(Expr):
    """Antiderivative of ``arg`` taken from a fixed base point."""

    __slots__ = ("arg",)
    _fields = ("arg",)

    def __init__(self, arg: Expr) -> None:
        self._init(arg=arg)


class Add(Expr):
    __slots__ = ("terms",)
    _fields = ("terms",)

    def __init__(self, terms: Iterable[Expr]) -> None:
        terms = tuple(terms)
        if len(terms) < 2:
            raise ValueError("Add needs at least two terms")
        self._init(terms=terms)


class Mul(Expr):
    __slots__ = ("factors",)
    _fields = ("factors",)

    def __init__(self, factors: Iterable[Expr]) -> None:
        factors = tuple(factors)
        if len(factors) < 2:
            raise ValueError("Mul needs at least two factors")
        self._init(factors=factors)


class Div(Expr):
    __slots__ = ("num", "den")
    _fields = ("num", "den")

    def __init__(self, num: Expr, den: Expr) -> None:
        self._init(num=num, den=den)


class Pow(Expr):
    __slots__ = ("base", "exp")
    _fields = ("base", "exp")

    def __init__(self, base: Expr, exp: int) -> None:
        if not isinstance(exp, int):
            raise TypeError("exponent must be an integer")
        self._init(base=base, exp=exp)


class Neg(Expr):
    __slots__ = ("arg",)
    _fields = ("arg",)

    def __init__(self, arg: Expr) -> None:
        self._init(arg=arg)


ZERO = Const(0)
ONE = Const(1)
x = X()


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Rational)):
        return Const(Fraction(value))
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    raise TypeError(f"cannot convert {value!r} to Expr")


def alpha(i: int, order: int = 0) -> Sym:
    """Opaque chain coefficient ``a<i>`` differentiated ``order`` times."""
    return Sym(f"a{i}", order)


def is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


# -- smart constructors ---------------------------------------------------


def add(*terms: Expr) -> Expr:
    flat: list[Expr] = []
    total = Fraction(0)
    for t in terms:
        for s in t.terms if isinstance(t, Add) else (t,):
            if isinstance(s, Const):
                total += s.value
            else:
                flat.append(s)
    if total != 0 or not flat:
        flat.append(Const(total))
    return flat[0] if len(flat) == 1 else Add(flat)


def mul(*factors: Expr) -> Expr:
    flat: list[Expr] = []
    coeff = Fraction(1)
    for f in factors:
        for s in f.factors if isinstance(f, Mul) else (f,):
            if isinstance(s, Const):
                coeff *= s.value
            else:
                flat.append(s)
    if coeff == 0:
        return ZERO
    if coeff != 1 or not flat:
        flat.insert(0, Const(coeff))
    return flat[0] if len(flat) == 1 else Mul(flat)


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.arg
    return Neg(e)


def div(num: Expr, den: Expr) -> Expr:
    if isinstance(den, Const):
        if den.value == 0:
            raise ZeroDivisionError("division by the constant 0")
        return mul(Const(1 / den.value), num)
    if is_const(num, 0):
        return ZERO
    return Div(num, den)


def power(base: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and n < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return Const(base.value**n)
    return Pow(base, n)


def func(name: str, arg: Expr) -> Expr:
    return Func(name, arg)


def exp(arg: Expr) -> Expr:
    return Func("exp", arg)


def integral(arg: Expr) -> Expr:
    return Int(arg)


# -- calculus ---------------------------------------------------------------


def differentiate(e: Expr) -> Expr:
    """d/dx of ``e``: opaque symbols gain one prime, ``Int(g)`` becomes ``g``."""
    cache = e._cache
    if "d" in cache:
        return cache["d"]
    out = _diff(e)
    cache["d"] = out
    return out


def _diff(e: Expr) -> Expr:
    if isinstance(e, (Const, Param)):
        return ZERO
    if isinstance(e, X):
        return ONE
    if isinstance(e, Sym):
        return Sym(e.name, e.order + 1)
    if isinstance(e, Int):
        return e.arg
    if isinstance(e, Add):
        return add(*(differentiate(t) for t in e.terms))
    if isinstance(e, Neg):
        return neg(differentiate(e.arg))
    if isinstance(e, Mul):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            df = differentiate(f)
            if not is_const(df, 0):
                terms.append(mul(*fs[:i], df, *fs[i + 1 :]))
        return add(*terms) if terms else ZERO
    if isinstance(e, Div):
        a, b = e.num, e.den
        top = add(mul(differentiate(a), b), neg(mul(a, differentiate(b))))
        return div(top, power(b, 2))
    if isinstance(e, Pow):
        return mul(Const(e.exp), power(e.base, e.exp - 1), differentiate(e.base))
    if isinstance(e, Func):
        da = differentiate(e.arg)
        if e.name == "sin":
            return mul(Func("cos", e.arg), da)
        if e.name == "cos":
            return neg(mul(Func("sin", e.arg), da))
        if e.name == "tan":
            return mul(add(ONE, power(e, 2)), da)
        if e.name == "exp":
            return mul(e, da)
        if e.name == "log":
            return div(da, e.arg)
    raise TypeError(f"cannot differentiate {e!r}")


def nth_derivative(e: Expr, k: int) -> Expr:
    for _ in range(k):
        e = differentiate(e)
    return e


def transform(e: Expr, leaf: Callable[[Expr], Expr | None]) -> Expr:
    """Rebuild ``e`` bottom-up, replacing any node for which ``leaf`` returns non-None."""
    r = leaf(e)
    if r is not None:
        return r
    if isinstance(e, (Const, X, Sym, Param)):
        return e
    if isinstance(e, Func):
        return Func(e.name, transform(e.arg, leaf))
    if isinstance(e, Int):
        return Int(transform(e.arg, leaf))
    if isinstance(e, Neg):
        return neg(transform(e.arg, leaf))
    if isinstance(e, Add):
        return add(*(transform(t, leaf) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(transform(f, leaf) for f in e.factors))
    if isinstance(e, Div):
        return div(transform(e.num, leaf), transform(e.den, leaf))
    if isinstance(e, Pow):
        return power(transform(e.base, leaf), e.exp)
    raise TypeError(f"unknown node {e!r}")


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace opaque symbols and parameters by expressions.

    ``Sym(name, k)`` becomes the k-th derivative of ``mapping[name]``.
    """
    mapping = {k: as_expr(v) for k, v in mapping.items()}

    def leaf(node: Expr):
        if isinstance(node, Sym) and node.name in mapping:
            return nth_derivative(mapping[node.name], node.order)
        if isinstance(node, Param) and node.name in mapping:
            return mapping[node.name]
        return None

    return transform(e, leaf)


def free_names(e: Expr) -> set[tuple[str, str]]:
    """Set of ``("sym", name)`` / ``("param", name)`` pairs occurring in ``e``."""
    out: set[tuple[str, str]] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Sym):
            out.add(("sym", n.name))
        elif isinstance(n, Param):
            out.add(("param", n.name))
        elif isinstance(n, (Func, Int, Neg)):
            stack.append(n.arg)
        elif isinstance(n, Add):
            stack.extend(n.terms)
        elif isinstance(n, Mul):
            stack.extend(n.factors)
        elif isinstance(n, Div):
            stack.extend((n.num, n.den))
        elif isinstance(n, Pow):
            stack.append(n.base)
    return out


# -- printing ---------------------------------------------------------------
#
# The printer emits exactly the grammar accepted by ``parser.parse`` and
# parenthesizes so that parsing the output rebuilds the same tree.


def _const_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _is_simple_const(e: Expr) -> bool:
    return isinstance(e, Const) and e.value.denominator == 1 and e.value >= 0


def _atomic(e: Expr) -> bool:
    return isinstance(e, (X, Sym, Param, Func, Int)) or _is_simple_const(e)


def to_text(e: Expr) -> str:
    if isinstance(e, Add):
        parts = [_first_term(e.terms[0])]
        for t in e.terms[1:]:
            if isinstance(t, Neg):
                parts.append(" - " + _term(t.arg, in_sum=True))
            elif isinstance(t, Const) and t.value < 0:
                parts.append(" - " + _const_text(-t.value))
            else:
                parts.append(" + " + _term(t, in_sum=True))
        return "".join(parts)
    return _first_term(e)


def _first_term(e: Expr) -> str:
    if isinstance(e, Add):
        return f"({to_text(e)})"
    return _term(e, in_sum=False)


def _term(e: Expr, in_sum: bool) -> str:
    if isinstance(e, Add):
        return f"({to_text(e)})"
    if isinstance(e, Mul):
        out = [_mul_first(e.factors[0])]
        out += [_factor(f) for f in e.factors[1:]]
        return "*".join(out)
    if isinstance(e, Div):
        num = e.num
        num_text = f"({to_text(num)})" if isinstance(num, Add) else _term(num, in_sum)
        return f"{num_text}/{_factor(e.den)}"
    if isinstance(e, Neg) and in_sum:
        # "a + -b" keeps a Neg inside the sum
        return "-" + _factor(e.arg)
    if isinstance(e, Const):
        return _const_text(e.value)
    return _factor(e)


def _mul_first(e: Expr) -> str:
    if isinstance(e, (Add, Mul)):
        return f"({to_text(e)})"
    if isinstance(e, Div):
        return _term(e, in_sum=False)
    if isinstance(e, Const):
        return _const_text(e.value)
    return _factor(e)


def _factor(e: Expr) -> str:
    """Text valid in the grammar's ``factor`` position."""
    if isinstance(e, Neg):
        return "-" + _factor(e.arg)
    if isinstance(e, Pow):
        base = _leaf(e.base) if _atomic(e.base) else f"({to_text(e.base)})"
        return f"{base}^{e.exp}"
    if _atomic(e):
        return _leaf(e)
    return f"({to_text(e)})"


def _leaf(e: Expr) -> str:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, X):
        return "x"
    if isinstance(e, Sym):
        return f"{e.name}{chr(39) * e.order}(x)"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Int):
        return f"Int({to_text(e.arg)})"
    raise TypeError(f"not a leaf: {e!r}")
