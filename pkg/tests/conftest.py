from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from riccati_chain.expr import Const, Func, Int, Sym, X, add, div, mul, neg, power

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=6)
nonzero_fractions = small_fractions.filter(lambda f: f != 0)


def _leaf():
    return st.one_of(
        st.builds(lambda f: Const(f), small_fractions),
        st.just(X()),
        st.builds(lambda i, k: Sym(f"a{i}", k), st.integers(0, 3), st.integers(0, 2)),
    )


def _extend(children):
    return st.one_of(
        st.builds(lambda a, b: add(a, b), children, children),
        st.builds(lambda a, b: mul(a, b), children, children),
        st.builds(neg, children),
        st.builds(lambda a, n: power(a, n), children, st.integers(0, 3)),
        st.builds(lambda a: Func("sin", a), children),
        st.builds(lambda a: Func("exp", mul(Const(Fraction(1, 4)), a)), children),
    )


# small trees without division, so every instantiation is pole-free
exprs = st.recursive(_leaf(), _extend, max_leaves=6)


def _with_division(children):
    return st.one_of(
        _extend(children),
        # denominators bounded away from zero
        st.builds(lambda a, b: div(a, add(Const(3), Func("cos", b))), children, children),
        st.builds(lambda a: Int(a), children),
    )


exprs_div = st.recursive(_leaf(), _with_division, max_leaves=6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA, RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, _ in CRITERIA:
        if name in RESULTS:
            ok, detail = RESULTS[name]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
