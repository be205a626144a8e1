from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from fds3 import forms as F
from fds3.quadrature import gauss_legendre, integrate_interval, triangle_rule, unit_interval_rule

RNG = np.random.default_rng(0)
PTS = RNG.uniform(0.1, 0.9, size=(20, 3))


def _fn(X):
    u, v, r = X.T
    return np.sin(u) * np.cos(2 * v) * r**2


def _fn_grad(X):
    u, v, r = X.T
    return np.column_stack([np.cos(u) * np.cos(2 * v) * r**2, -2 * np.sin(u) * np.sin(2 * v) * r**2,
                            2 * np.sin(u) * np.cos(2 * v) * r])


def _gn(X):
    u, v, r = X.T
    return np.exp(u * v) + r


def _gn_grad(X):
    u, v, r = X.T
    return np.column_stack([v * np.exp(u * v), u * np.exp(u * v), np.ones_like(r)])


def test_wedge_of_basis_one_forms():
    du, dv = F.constant_one_form([1, 0, 0]), F.constant_one_form([0, 1, 0])
    uv = F.wedge(du, dv).evaluate(PTS)
    vu = F.wedge(dv, du).evaluate(PTS)
    assert np.allclose(F.component(uv, 2, (0, 1)), 1)
    assert np.allclose(F.component(vu, 2, (0, 1)), -1)
    assert np.allclose(F.component(uv, 2, (1, 0)), -1)


def test_df_wedge_dg_matches_hand_formula():
    f, g = F.Function0(_fn, _fn_grad, "f"), F.Function0(_gn, _gn_grad, "g")
    w = F.wedge(f.d(), g.d()).evaluate(PTS)
    a, b = _fn_grad(PTS), _gn_grad(PTS)
    for n, (i, j) in enumerate(F.BASIS[2]):
        assert np.allclose(w[:, n], a[:, i] * b[:, j] - a[:, j] * b[:, i])


def test_d_of_product_form_is_leibniz_and_dd_zero():
    f, g = F.Function0(_fn, _fn_grad, "f"), F.Function0(_gn, _gn_grad, "g")
    one = F.wedge(f, g.d())
    exact = F.wedge(f.d(), g.d()).evaluate(PTS)
    assert np.allclose(one.d().evaluate(PTS), exact)
    assert one.d().d().is_zero or np.allclose(one.d().d().evaluate(PTS), 0)


def test_finite_difference_derivative_matches_analytic():
    # omega = f du, d omega = f_v dv^du + f_r dr^du
    omega = F.CoefficientForm(1, lambda X: np.column_stack([_fn(X), 0 * _fn(X), 0 * _fn(X)]), name="f du")
    d = omega.d().evaluate(PTS)
    grad = _fn_grad(PTS)
    assert np.allclose(F.component(d, 2, (1, 0)), grad[:, 1], atol=1e-8)
    assert np.allclose(F.component(d, 2, (2, 0)), grad[:, 2], atol=1e-8)
    assert np.allclose(F.component(d, 2, (1, 2)), 0, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_graded_commutativity(k, l, seed):
    assume(k + l <= 3)
    rng = np.random.default_rng(seed)
    ca = rng.normal(size=F.ncomp(k))
    cb = rng.normal(size=F.ncomp(l))
    a = F.CoefficientForm(k, lambda X, c=ca: np.broadcast_to(c, (len(X), len(c))), closed=True)
    b = F.CoefficientForm(l, lambda X, c=cb: np.broadcast_to(c, (len(X), len(c))), closed=True)
    ab = F.wedge(a, b).evaluate(PTS[:2])
    ba = F.wedge(b, a).evaluate(PTS[:2])
    assert np.allclose(ab, (-1) ** (k * l) * ba)


def test_zero_simplification():
    f = F.Function0(_fn, _fn_grad)
    assert F.scale(0, f).is_zero
    assert F.wedge(F.Zero(1), f.d()).is_zero
    assert F.add(F.Zero(1), f.d()) is not None
    with pytest.raises(ValueError):
        F.add(f, f.d())
    with pytest.raises(ValueError):
        F.as_points(np.zeros((3, 2)))


@pytest.mark.parametrize("order", [1, 4, 9, 16])
def test_gauss_legendre_exact_on_polynomials(order):
    x, w = gauss_legendre(order)
    for deg in range(2 * order):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(np.sum(w * x**deg) - exact) < 1e-13


@pytest.mark.parametrize("order", [2, 5, 8])
def test_triangle_rule_exact_on_monomials(order):
    pts, w = triangle_rule(order)
    assert abs(w.sum() - 0.5) < 1e-14
    for a in range(order):
        for b in range(order - a):
            exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
            assert abs(np.sum(w * pts[:, 0] ** a * pts[:, 1] ** b) - exact) < 1e-14


def test_interval_rule_against_scipy_quad():
    fn = lambda t: np.exp(np.sin(3 * t)) * np.cos(t)
    ref, _ = integrate.quad(fn, 0.2, 1.7, epsabs=1e-13)
    assert abs(integrate_interval(fn, 0.2, 1.7, 24) - ref) < 1e-12
    x, w = unit_interval_rule(5)
    assert abs(w.sum() - 1) < 1e-15 and x.min() > 0 and x.max() < 1
