import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riccati_chain.chain import build_chain
from riccati_chain.evaluate import evaluate, random_polynomial
from riccati_chain.expr import Const, Param, X, alpha
from riccati_chain.grid import GridFn
from riccati_chain.jet import (
    ChainParams,
    JetPoly,
    SingularityError,
    apply_L,
    central_difference,
    cole_hopf_check,
    iterate_L,
    omega_samples,
    total_derivative,
)
from riccati_chain.taylor import Taylor

c = Param("c")
w, w1, w2 = JetPoly.var(0), JetPoly.var(1), JetPoly.var(2)


def J(text):
    return JetPoly.from_expr(text)


def test_total_derivative_examples():
    assert total_derivative(w) == w1
    assert total_derivative(J("c*w(x)^2")) == J("2*c*w(x)*w'(x)")
    assert total_derivative(w1 + J("c*w(x)^2")) == w2 + J("2*c*w(x)*w'(x)")


def test_apply_L_examples():
    assert apply_L(w, c) == w1 + J("c*w(x)^2")
    assert apply_L(w1 + J("c*w(x)^2"), c) == J("w''(x) + 3*c*w(x)*w'(x) + c^2*w(x)^3")
    assert apply_L(JetPoly.const(1), c) == J("c*w(x)")


def test_coefficients_are_differentiated():
    assert total_derivative(J("a1(x)*w(x)")) == J("a1'(x)*w(x) + a1(x)*w'(x)")


def test_printing_order():
    assert str(iterate_L(c, 2)[2]) == "w'' + 3*c*w*w' + c^2*w^3"


_mono = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
_coef = st.sampled_from(["1", "-2", "c", "a1(x)", "x^2", "a2'(x)/3"])
jetpolys = st.dictionaries(_mono, _coef, max_size=4).map(JetPoly)


@given(jetpolys, jetpolys)
def test_leibniz_rule(P, Q):
    assert total_derivative(P * Q) == total_derivative(P) * Q + P * total_derivative(Q)


@given(st.dictionaries(_mono.filter(lambda m: sum(m) == 2), _coef, min_size=1, max_size=3).map(JetPoly))
def test_degree_grows_by_one(P):
    if not len(P):
        return
    assert P.is_homogeneous()
    assert apply_L(P, c).degree == P.degree + 1


@pytest.mark.parametrize("k", range(1, 5))
def test_L_iteration_with_exact_jets(k, rng):
    # phi = exp(cubic) has no zeros; w = phi'/(c phi)
    cval = 0.75
    for _ in range(3):
        phi_expr = Taylor.variable(np.linspace(-1, 1, 41), k + 1)
        cubic = random_polynomial(rng)
        phi = evaluate(cubic, phi_expr).exp()
        wj = Taylor([i * a for i, a in enumerate(phi.coeffs[1:], start=1)]) / (cval * phi.truncate(k))
        lhs = iterate_L(Const(3) / 4, k)[k].evaluate(wj.derivatives(), 0.0)
        rhs = phi.derivative(k + 1) / (cval * phi.value)
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(rhs)))


# the fourth difference is roundoff-bound at step 1e-3 (error ~ eps/h^4), so k = 4 uses a coarser grid
@pytest.mark.parametrize("k, step", [(1, 1e-3), (2, 1e-3), (3, 1e-3), (4, 4e-3)])
def test_L_iteration_on_difference_grids(k, step, rng):
    cval = 1.25
    cubic = random_polynomial(rng)
    g = GridFn.sample(f"exp({cubic})", 0.0, 1.0, step, derivatives=k + 1)
    # only phi and phi' from the grid; higher w derivatives by central differences
    phi = GridFn(g.start, g.step, g.derivs[:2])
    ws = omega_samples(phi, cval, k)
    lhs = iterate_L(Const(5) / 4, k)[k].evaluate(ws, g.x)
    rhs = g.derivative_samples(k + 1) / (cval * g.values)
    inner = np.isfinite(lhs)
    scale = max(1.0, np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)[inner]) / scale < 1e-5


def test_iterate_L_trivial_chain_is_monic_top_order():
    assert iterate_L(c, 3)[3].order == 3


def test_cosh_solves_first_chain():
    params = ChainParams(1, 1, (Const(-1), Const(0)))
    P = build_chain(params).lhs
    phi = GridFn.sample("exp(x)/2 + exp(-x)/2", 0.0, 2.0, 1e-3, derivatives=1)
    assert cole_hopf_check(P, Const(1), phi) < 1e-6
    values_only = GridFn.from_values(0.0, 1e-3, phi.values)
    assert cole_hopf_check(P, Const(1), values_only) < 1e-6


def test_sign_change_is_a_singularity():
    phi = GridFn.sample("x - 1/3", 0.0, 1.0, 1e-3, derivatives=1)
    P = build_chain(ChainParams(1, 1, (Const(0), Const(0)))).lhs
    with pytest.raises(SingularityError) as info:
        cole_hopf_check(P, Const(1), phi)
    assert info.value.node == 334


def test_central_difference_recovers_polynomials():
    xs = np.linspace(0, 1, 101)
    y = xs**3
    d3 = central_difference(y, 3, xs[1] - xs[0])
    assert np.allclose(d3[2:-2], 6.0, atol=1e-6)
    assert np.isnan(d3[:2]).all()


def test_chain_params_validation():
    with pytest.raises(ValueError):
        ChainParams(0, 1, (Const(0),))
    with pytest.raises(ValueError):
        ChainParams(1, 0, (Const(0), Const(0)))
    with pytest.raises(ValueError):
        ChainParams(2, 1, (alpha(0), alpha(1)))
    with pytest.raises(ValueError):
        ChainParams(1, X(), (alpha(0), alpha(1)))
