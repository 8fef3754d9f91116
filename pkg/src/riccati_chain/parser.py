"""Recursive-descent parser for coefficient expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' ['-'] integer)?
    base   := number | 'x' | symbol | param | func '(' expr ')' | '(' expr ')'
    symbol := name primes '(' 'x' ')'      name in a, a0, a1, ..., p, q, f, w, phi
    param  := 'c'
    func   := sin | cos | tan | exp | log | Int

Primes may be ASCII ``'`` or U+2032. Division of two literal constants is
folded into a single exact rational, as is negation of a constant.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .expr import FUNCTIONS, Add, Const, Div, Expr, Func, Int, Mul, Neg, Param, Pow, Sym, X

SYMBOL_NAME = re.compile(r"a\d*|p|q|f|w|phi")
PARAM_NAMES = frozenset({"c"})

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<prime>['′])
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class _Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(source):
            m = _TOKEN.match(source, pos)
            if m is None:
                raise ParseError(f"unexpected character {source[pos]!r}", self._byte(pos))
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0

    def _byte(self, pos: int) -> int:
        return len(self.source[:pos].encode("utf-8"))

    def peek(self) -> tuple[str, str, int]:
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", len(self.source))

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        where = "end of input" if tok[0] == "eof" else repr(tok[1])
        return ParseError(f"{message}, found {where}", self._byte(tok[2]))

    def expect(self, text: str) -> None:
        tok = self.peek()
        if tok[1] != text or tok[0] not in ("op", "ident"):
            raise self.error(f"expected {text!r}")
        self.i += 1

    # grammar rules

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "eof":
            raise self.error("unexpected trailing input")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            t = self.term()
            terms.append(_negate(t) if op == "-" else t)
        return terms[0] if len(terms) == 1 else Add(terms)

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            f = self.factor()
            if op == "*":
                factors.append(f)
            else:
                left = factors[0] if len(factors) == 1 else Mul(factors)
                factors = [_divide(left, f)]
        return factors[0] if len(factors) == 1 else Mul(factors)

    def factor(self) -> Expr:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.next()
            return _negate(self.factor())
        b = self.base()
        if self.peek()[1] == "^":
            self.next()
            sign = 1
            if self.peek()[1] == "-":
                self.next()
                sign = -1
            tok = self.next()
            if tok[0] != "num" or "." in tok[1]:
                raise self.error("expected integer exponent", tok)
            return Pow(b, sign * int(tok[1]))
        return b

    def base(self) -> Expr:
        tok = self.peek()
        kind, text, pos = tok
        if kind == "num":
            self.next()
            return Const(Fraction(text))
        if kind == "op" and text == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "ident":
            self.next()
            if text == "x":
                return X()
            if text in FUNCTIONS or text == "Int":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Int(arg) if text == "Int" else Func(text, arg)
            return self.symbol(tok)
        raise self.error("expected an operand")

    def symbol(self, tok) -> Expr:
        _, name, pos = tok
        order = 0
        while self.peek()[0] == "prime":
            self.next()
            order += 1
        nxt = self.peek()
        if nxt[1] == "(":
            if not SYMBOL_NAME.fullmatch(name):
                raise ParseError(f"unknown function name {name!r}", self._byte(pos))
            self.next()
            arg = self.peek()
            if arg[1] != "x":
                raise ParseError(
                    f"malformed symbol {name!r}: expected '(x)' after the name", self._byte(arg[2])
                )
            self.next()
            if self.peek()[1] != ")":
                raise ParseError(
                    f"malformed symbol {name!r}: expected '(x)' after the name",
                    self._byte(self.peek()[2]),
                )
            self.next()
            return Sym(name, order)
        if order:
            raise ParseError(
                f"malformed symbol derivative suffix on {name!r}: primes must be followed by '(x)'",
                self._byte(nxt[2]),
            )
        if name in PARAM_NAMES:
            return Param(name)
        if SYMBOL_NAME.fullmatch(name):
            raise ParseError(f"symbol {name!r} must be written {name}(x)", self._byte(nxt[2]))
        raise ParseError(f"unknown identifier {name!r}", self._byte(pos))


def _negate(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    return Neg(e)


def _divide(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(source).parse()
