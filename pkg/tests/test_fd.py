import numpy as np
import pytest
from hypothesis import given, strategies as st

from collarmass.fd import diff_open, diff_parity, fornberg_weights


def test_fornberg_reproduces_classic_stencils():
    assert np.allclose(fornberg_weights(0, [-1, 0, 1], 1), [-0.5, 0, 0.5])
    assert np.allclose(fornberg_weights(0, [-1, 0, 1], 2), [1, -2, 1])


@pytest.mark.parametrize("accuracy", [4, 6])
def test_parity_derivative_converges_at_stated_order(accuracy):
    errs = []
    for n in (65, 129):
        t = np.linspace(0, np.pi, n)
        d = diff_parity(np.sin(t) * np.exp(np.cos(t)), t[1], 1, accuracy, parity=-1)
        exact = np.exp(np.cos(t)) * (np.cos(t) - np.sin(t) ** 2)
        errs.append(np.abs(d - exact).max())
    assert errs[0] / errs[1] > 2 ** accuracy * 0.7


def test_open_derivative_of_polynomial_is_exact():
    x = np.linspace(0, 1, 17)
    u = x**5 - 3 * x**2
    assert np.allclose(diff_open(u, x[1], 1, 6), 5 * x**4 - 6 * x, atol=1e-10)
    assert np.allclose(diff_open(u, x[1], 2, 6), 20 * x**3 - 6, atol=1e-8)


def test_longdouble_input_keeps_precision():
    x = np.linspace(0, 1, 65).astype(np.longdouble)
    d = diff_open(np.exp(x), x[1] - x[0], 1, 8)
    assert d.dtype == np.longdouble
    assert np.abs(d - np.exp(x)).max() < 1e-12


@given(st.integers(1, 3), st.sampled_from([1, -1]))
def test_parity_of_derivative(deriv, parity):
    t = np.linspace(0, np.pi, 65)
    u = np.cos(2 * t) if parity == 1 else np.sin(3 * t)
    d = diff_parity(u, t[1], deriv, 6, parity)
    # odd results vanish at both poles
    if parity * (-1) ** deriv == -1:
        assert abs(d[0]) < 1e-9 and abs(d[-1]) < 1e-9
