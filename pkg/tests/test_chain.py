import time

import numpy as np
import pytest
import sympy as sp

import oracle
from riccati_chain.canon import same
from riccati_chain.chain import LinearODE, build_chain, cole_hopf_image, linear_from_image, linearize
from riccati_chain.evaluate import random_table
from riccati_chain.expr import Const, Param, Sym, alpha
from riccati_chain.jet import ChainParams, JetPoly
from riccati_chain.numverify import default_ivp, riccati_residual


def test_first_order_with_unit_constant():
    eq = build_chain(ChainParams(1, 1, (alpha(0), alpha(1))))
    assert eq.lhs == JetPoly.from_expr("w'(x) + w(x)^2 + a1(x)*w(x) + a0(x)")


def test_second_order_expansion():
    eq = build_chain(ChainParams.opaque(2))
    expected = "w''(x) + (3*c*w(x) + a2(x))*w'(x) + c^2*w(x)^3 + c*a2(x)*w(x)^2 + a1(x)*w(x) + a0(x)"
    assert eq.lhs == JetPoly.from_expr(expected)


def test_third_order_expansion():
    eq = build_chain(ChainParams.opaque(3))
    expected = (
        "w'''(x) + (4*c*w(x) + a3(x))*w''(x) + (6*c^2*w(x)^2 + 3*c*a3(x)*w(x) + a2(x))*w'(x)"
        " + 3*c*w'(x)^2 + c^3*w(x)^4 + c^2*a3(x)*w(x)^3 + c*a2(x)*w(x)^2 + a1(x)*w(x) + a0(x)"
    )
    assert eq.lhs == JetPoly.from_expr(expected)


@pytest.mark.parametrize("n", range(1, 6))
def test_expansion_against_sympy(n):
    ours = oracle.to_sympy(build_chain(ChainParams.opaque(n)).lhs.to_expr())
    assert sp.expand(ours - oracle.chain_lhs(n, sp.Symbol("c"))) == 0


@pytest.mark.parametrize("n", range(1, 6))
def test_top_degree_monomial(n):
    lhs = build_chain(ChainParams.opaque(n)).lhs
    assert lhs.degree == n + 1
    assert same(lhs.coefficient((n + 1,)), Param("c") ** n)


@pytest.mark.parametrize("n", range(1, 4))
def test_zero_coefficients_reduce_to_pure_power(n):
    params = ChainParams(n, "c", (Const(0),) * (n + 1))
    assert build_chain(params).lhs.order == n
    assert linearize(params) == LinearODE((Const(0),) * (n + 1))


def test_linearize_forms():
    assert str(linearize(ChainParams.opaque(1))) == "phi''(x) + a1(x)*phi'(x) + c*a0(x)*phi(x) = 0"
    assert str(linearize(ChainParams.opaque(2))) == (
        "phi'''(x) + a2(x)*phi''(x) + a1(x)*phi'(x) + c*a0(x)*phi(x) = 0"
    )
    ode = linearize(ChainParams.opaque(3))
    assert ode.order == 4 and same(ode.coeffs[0], Param("c") * alpha(0))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symbolic_round_trip(n):
    params = ChainParams.opaque(n)
    image = cole_hopf_image(build_chain(params))
    assert linear_from_image(image, n + 1) == linearize(params)


def test_round_trip_against_sympy():
    c = sp.Symbol("c")
    lhs = oracle.chain_lhs(3, c)
    phi = oracle.PHI
    sub = sp.expand(sp.simplify(c * phi * lhs.subs(oracle.W, sp.diff(phi, oracle.x) / (c * phi)).doit()))
    ours = oracle.to_sympy(linearize(ChainParams.opaque(3)).symbolic_apply(Sym("phi")))
    assert sp.simplify(sub - ours) == 0


def test_numeric_round_trip_small_example():
    params = ChainParams(2, 1, (Const(-1), Const(0), Const(0)))
    ivp = default_ivp(params, init=(2.0, 1.0, 1.0))
    assert riccati_residual(params, ivp) < 1e-5


@pytest.mark.parametrize("n", range(1, 6))
def test_numeric_round_trip_random(n):
    rng = np.random.default_rng(100 + n)
    params = ChainParams.opaque(n)
    table = random_table(params.table_names(), rng)
    r = riccati_residual(params, default_ivp(params, table, stop=0.8))
    assert r < 1e-4


def test_mismatched_ivp_is_rejected():
    params = ChainParams.opaque(2)
    other = ChainParams(2, 1, (alpha(0), alpha(1), alpha(2)))
    with pytest.raises(ValueError):
        riccati_residual(params, default_ivp(other))


def test_order_cap():
    with pytest.raises(ValueError):
        build_chain(ChainParams.opaque(9))
    t0 = time.perf_counter()
    build_chain(ChainParams.opaque(8))
    assert time.perf_counter() - t0 < 5
