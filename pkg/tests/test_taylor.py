import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riccati_chain.grid import GridFn
from riccati_chain.taylor import Taylor

points = st.floats(-1.0, 1.0)


def _derivs(t):
    return [float(d) for d in t.derivatives()]


@given(points)
def test_exp_jet(x0):
    t = Taylor.variable(x0, 4).exp()
    assert np.allclose(_derivs(t), [math.exp(x0)] * 5, rtol=1e-14)


@given(points)
def test_sin_cos_jets(x0):
    s = Taylor.variable(x0, 3).sin()
    c = Taylor.variable(x0, 3).cos()
    assert np.allclose(_derivs(s), [math.sin(x0), math.cos(x0), -math.sin(x0), -math.cos(x0)], atol=1e-14)
    assert np.allclose(_derivs(c), [math.cos(x0), -math.sin(x0), -math.cos(x0), math.sin(x0)], atol=1e-14)


@given(points)
def test_tan_jet(x0):
    t = Taylor.variable(x0, 3).tan()
    s = 1 / math.cos(x0) ** 2
    tn = math.tan(x0)
    assert np.allclose(_derivs(t), [tn, s, 2 * s * tn, 2 * s * (s + 2 * tn * tn)], rtol=1e-12)


@given(st.floats(0.2, 3.0))
def test_log_jet(x0):
    t = Taylor.variable(x0, 3).log()
    assert np.allclose(_derivs(t), [math.log(x0), 1 / x0, -1 / x0**2, 2 / x0**3], rtol=1e-13)


@given(points, points)
def test_quotient_inverts_product(x0, shift):
    a = Taylor.variable(x0, 3).exp() + 2.0
    b = Taylor.variable(x0, 3).sin() * 0.5 + 3.0 + shift
    q = (a * b) / b
    assert np.allclose(_derivs(q), _derivs(a), rtol=1e-12)


def test_integer_powers():
    t = Taylor.variable(2.0, 3) ** 3
    assert _derivs(t) == [8.0, 12.0, 12.0, 6.0]
    inv = Taylor.variable(2.0, 3) ** -1
    assert np.allclose(_derivs(inv), [0.5, -0.25, 0.25, -0.375])


def test_composition_is_chain_rule():
    # d/dx exp(sin x) at 0: values 1, 1, 1, 0
    t = Taylor.variable(0.0, 3).sin().exp()
    assert np.allclose(_derivs(t), [1.0, 1.0, 1.0, 0.0], atol=1e-15)


def test_vectorized_points():
    xs = np.linspace(0, 1, 7)
    t = Taylor.variable(xs, 3).exp()
    assert np.allclose(t.derivative(3), np.exp(xs))


def test_grid_spline_jets_of_sampled_function():
    g = GridFn.sample("sin(x)", 0.0, 2.0, 1e-2)
    jets = g.jets(3)
    inner = slice(20, -20)
    assert np.max(np.abs(jets.derivative(1)[inner] - np.cos(g.x[inner]))) < 1e-6
    assert np.max(np.abs(jets.derivative(3)[inner] + np.cos(g.x[inner]))) < 1e-2


def test_grid_sample_with_exact_derivatives():
    g = GridFn.sample("x^3", 0.0, 1.0, 0.25, derivatives=2)
    assert np.allclose(g.derivative_samples(2), 6 * g.x)


def test_grid_invariants():
    with pytest.raises(ValueError):
        GridFn.from_values(0.0, 0.1, [1, 2, 3])
    with pytest.raises(ValueError):
        GridFn.from_values(0.0, -0.1, [1, 2, 3, 4, 5])
    with pytest.raises(ValueError):
        GridFn.from_values(0.0, 0.1, [1, 2, float("nan"), 4, 5])
