from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exprs, exprs_div, nonzero_fractions
from riccati_chain.canon import is_zero, normalize, same
from riccati_chain.evaluate import EvaluationError, SymbolTable, equals, evaluate, random_table
from riccati_chain.expr import (
    Add,
    Const,
    Func,
    Int,
    Pow,
    Sym,
    X,
    add,
    alpha,
    differentiate,
    mul,
    substitute,
    to_text,
)
from riccati_chain.parser import ParseError, parse

# -- parser -----------------------------------------------------------------


def test_parse_sum_of_power_and_sine():
    e = parse("x^2 + sin(x)")
    assert isinstance(e, Add)
    assert e.terms == (Pow(X(), 2), Func("sin", X()))


def test_parse_symbol_derivative():
    assert parse("a2'(x)") == Sym("a2", 1)
    assert parse("a2′′(x)") == Sym("a2", 2)
    assert parse("q(x)") == Sym("q")


def test_trailing_operator_reports_offset():
    with pytest.raises(ParseError) as info:
        parse("x +")
    assert info.value.offset == 3


def test_unknown_function():
    with pytest.raises(ParseError, match="unknown function"):
        parse("sinh(x)")


def test_malformed_derivative_suffix():
    with pytest.raises(ParseError, match="derivative suffix"):
        parse("a1'")


def test_offsets_count_bytes():
    with pytest.raises(ParseError) as info:
        parse("a1′(x) +")
    assert info.value.offset == len("a1′(x) +".encode())


@given(exprs_div)
def test_print_parse_round_trip(e):
    assert parse(to_text(e)) == e


@given(exprs)
def test_round_trip_of_normal_form(e):
    n = normalize(e)
    assert same(parse(to_text(n)), n)


# -- differentiation ---------------------------------------------------------


def test_power_rule():
    assert same(differentiate(parse("x^2")), parse("2*x"))


def test_symbol_derivative():
    assert differentiate(alpha(2)) == Sym("a2", 1)


def test_integral_node_differentiates_to_integrand():
    assert same(differentiate(Int(alpha(1))), alpha(1))


def test_gauge_derivative():
    u = parse("exp(-1/3*Int(a2(x)))")
    assert same(differentiate(u), parse("-a2(x)/3*exp(-1/3*Int(a2(x)))"))


@given(exprs, exprs, nonzero_fractions, nonzero_fractions)
def test_linearity(e1, e2, a, b):
    lhs = differentiate(add(mul(Const(a), e1), mul(Const(b), e2)))
    rhs = add(mul(Const(a), differentiate(e1)), mul(Const(b), differentiate(e2)))
    assert equals(lhs, rhs)


@given(exprs, exprs)
def test_product_rule(e1, e2):
    lhs = differentiate(mul(e1, e2))
    rhs = add(mul(differentiate(e1), e2), mul(e1, differentiate(e2)))
    assert equals(lhs, rhs)


@given(exprs_div, st.integers(0, 2**31))
def test_derivative_matches_central_difference(e, seed):
    rng = np.random.default_rng(seed)
    table = random_table([e], rng)
    x0 = float(rng.uniform(-0.9, 0.9))
    h = 1e-5
    fd = (evaluate(e, x0 + h, table) - evaluate(e, x0 - h, table)) / (2 * h)
    exact = evaluate(differentiate(e), x0, table)
    assert abs(fd - exact) <= 1e-5 * max(abs(exact), 1.0)


# -- normal forms ------------------------------------------------------------


def test_ring_identity():
    e = parse("(a2(x) + a1(x))*a2(x) - a2(x)*a1(x)")
    assert normalize(e) == normalize(parse("a2(x)^2"))


def test_permuted_terms_share_normal_form():
    a = parse("a1(x) - a2(x)^2/3 - a2'(x)")
    b = parse("-a2'(x) + a1(x) - 1/3*a2(x)*a2(x)")
    assert normalize(a) == normalize(b)


def test_no_trigonometric_simplification():
    e = parse("sin(x)^2 + cos(x)^2")
    assert not same(e, Const(1))
    assert equals(e, Const(1))


@given(exprs_div)
def test_normalize_idempotent(e):
    n = normalize(e)
    assert normalize(n) == n


@given(st.lists(exprs, min_size=2, max_size=4), st.randoms())
def test_equals_stable_under_reordering(terms, r):
    shuffled = list(terms)
    r.shuffle(shuffled)
    assert normalize(add(*terms)) == normalize(add(*shuffled))
    assert equals(add(*terms), add(*shuffled))


def test_reciprocal_atoms_combine():
    assert is_zero(parse("1/(x + 3)^2") - parse("(x + 3)^-2"))
    assert same(parse("(x^2 - 1)/(x - 1)"), parse("x + 1"))


def test_substitute_maps_derivatives():
    e = substitute(parse("a1'(x) + a1(x)"), {"a1": parse("x^3")})
    assert same(e, parse("3*x^2 + x^3"))


# -- evaluation --------------------------------------------------------------


def test_evaluate_basics():
    assert evaluate(parse("x^2"), 3.0) == 9.0
    assert evaluate(parse("exp(x)"), 0.0) == 1.0


def test_integral_from_base():
    assert abs(evaluate(parse("Int(2*x)"), 2.0, SymbolTable()) - 4.0) < 1e-10


def test_evaluation_errors():
    with pytest.raises(EvaluationError):
        evaluate(parse("1/x"), 0.0)
    with pytest.raises(EvaluationError):
        evaluate(parse("log(x)"), -1.0)
    with pytest.raises(EvaluationError):
        evaluate(parse("a7(x)"), 0.0)


def test_equals_resamples_poles():
    # 1/x vanishes nowhere but has a pole at 0; sampling still terminates
    assert equals(parse("x/x^2"), parse("1/x"), trials=20)


def test_equals_rejects_printed_is_false():
    assert not equals(parse("a1(x)*a2(x)^2"), parse("a1(x)*a2(x)"))


def test_equals_requires_a_trial():
    with pytest.raises(ValueError):
        equals(X(), X(), trials=0)


def test_random_table_ranges(rng):
    t = random_table(["a0", "a1", "c"], rng)
    c = t.entries["c"]
    assert isinstance(c, Const) and 0.5 <= abs(c.value) <= 2
    # cubic in x: the fourth derivative vanishes, the third does not
    a1 = t.entries["a1"]
    assert is_zero(differentiate(differentiate(differentiate(differentiate(a1)))))
    assert not is_zero(differentiate(differentiate(differentiate(a1))))


def test_fraction_constants_are_exact():
    e = parse("2/27*a2(x)^3")
    assert Fraction(2, 27) in [f.value for f in _consts(e)]


def _consts(e):
    if isinstance(e, Const):
        yield e
    for child in getattr(e, "factors", ()) + getattr(e, "terms", ()):
        yield from _consts(child)
