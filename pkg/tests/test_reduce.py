from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

import oracle
from riccati_chain.canon import is_zero, normalize, same
from riccati_chain.chain import LinearODE, linearize
from riccati_chain.evaluate import equals, random_table
from riccati_chain.expr import Const, Sym, alpha, differentiate
from riccati_chain.jet import ChainParams
from riccati_chain.numverify import gauge_residual
from riccati_chain.parser import parse
from riccati_chain.reduce import conjugate, depress, gauge_of
from riccati_chain.schwarz import proportionality, sl_schwarzian


def opaque_ode(order):
    return linearize(ChainParams.opaque(order - 1))


def test_identity_gauge_leaves_coefficients():
    ode = opaque_ode(3)
    assert all(same(a, b) for a, b in zip(conjugate(ode, Const(0)), ode.coeffs))


def test_general_gauge_subleading():
    out = conjugate(opaque_ode(3), Sym("q"))
    assert same(out[2], parse("a2(x) + 3*q(x)"))


def test_order_two_normal_form():
    red = depress(LinearODE((Sym("q"), Sym("p"))))
    assert same(red.coeffs[0], parse("q(x) - p(x)^2/4 - p'(x)/2"))


def test_order_two_is_half_the_schwarzian():
    red = depress(LinearODE((Sym("q"), Sym("p"))))
    assert same(red.coeffs[0], sl_schwarzian("p(x)", "q(x)") / 2)
    assert proportionality(red.coeffs[0], sl_schwarzian("p(x)", "q(x)")) == Fraction(1, 2)


def test_order_two_without_first_derivative():
    red = depress(LinearODE((Sym("q"), Const(0))))
    assert same(red.coeffs[0], Sym("q"))


def test_order_three_coefficients():
    red = depress(opaque_ode(3))
    assert same(red.coeffs[1], parse("a1(x) - a2(x)^2/3 - a2'(x)"))
    assert same(red.coeffs[0], parse("c*a0(x) - a1(x)*a2(x)/3 + 2*a2(x)^3/27 - a2''(x)/3"))


def test_order_three_printed_constant_coefficient_differs():
    red = depress(opaque_ode(3))
    printed = parse("c*a0(x) - a1(x)*a2(x)^2/3 - 2*a2(x)^2/27 - a2''(x)/3")
    assert not equals(red.coeffs[0], printed)


def test_order_four_coefficients():
    red = depress(opaque_ode(4))
    assert equals(red.coeffs[2], parse("a2(x) - 3*a3(x)^2/8 - 3*a3'(x)/2"))
    assert equals(red.coeffs[1], parse("a1(x) - a2(x)*a3(x)/2 + a3(x)^3/8 - a3''(x)"))
    assert equals(
        red.coeffs[0],
        parse(
            "c*a0(x) - a1(x)*a3(x)/4 + a2(x)*a3(x)^2/16 - 3*a3(x)^4/256"
            " - a2(x)*a3'(x)/4 + 3*a3(x)^2*a3'(x)/32 + 3*a3'(x)^2/16 - a3'''(x)/4"
        ),
    )


@pytest.mark.parametrize("order", [2, 3, 4, 5])
def test_subleading_eliminated(order):
    ode = LinearODE(tuple(alpha(i) for i in range(order)))
    red = depress(ode)
    assert is_zero(red.coeffs[order - 1])


@pytest.mark.parametrize("order", [2, 3, 4, 5])
def test_against_sympy(order):
    ode = LinearODE(tuple(alpha(i) for i in range(order)))
    red = depress(ode)
    ref = oracle.depressed_coefficients([oracle.fn(f"a{i}") for i in range(order)])
    for k in range(order):
        assert sp.expand(oracle.to_sympy(red.coeffs[k]) - ref[k]) == 0


@pytest.mark.parametrize("order, text", [(2, "exp(-1/2*Int(p(x)))"), (3, "exp(-1/3*Int(a2(x)))"), (4, "exp(-1/4*Int(a3(x)))")])
def test_gauge_factor(order, text):
    ode = LinearODE((Sym("q"), Sym("p"))) if order == 2 else opaque_ode(order)
    g = gauge_of(ode)
    assert str(g) == text
    assert same(differentiate(g.factor), normalize(g.logderiv * g.factor))


@pytest.mark.parametrize("order", [2, 3, 4, 5])
def test_solution_correspondence(order):
    rng = np.random.default_rng(order)
    ode = LinearODE(tuple(alpha(i) for i in range(order)))
    table = random_table([f"a{i}" for i in range(order)], rng)
    assert gauge_residual(ode, table, 0.0, 0.8, 1e-3) < 1e-5


def test_gauge_needs_order_two():
    with pytest.raises(ValueError):
        gauge_of(LinearODE((alpha(0),)))
