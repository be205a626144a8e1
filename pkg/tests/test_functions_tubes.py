from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fds3.functions import (
    INF,
    ExpressionError,
    MeromorphicFunction,
    parse_function,
    tame_symbol,
    weil_product,
)
from fds3.tubes import ContinuedLog, FlowPrimitive, Tube, TubeLog, continue_log, max_radius

TWO_PI_I = 2j * math.pi


def test_parse_simple_divisors():
    assert parse_function("z").divisor == ((0j, 1), (INF, -1))
    f = parse_function("z^2-1")
    assert f.order(1) == 1 and f.order(-1) == 1 and f.order(INF) == -2
    g = parse_function("(z-1)/(z+1)^2")
    assert g.order(1) == 1 and g.order(-1) == -2 and g.order(INF) == 1
    c = parse_function("2+3i")
    assert c.is_constant and c.scale == 2 + 3j
    h = parse_function("z^3-1")
    assert all(abs(abs(p) - 1) < 1e-14 for p, _ in h.finite_divisor)
    assert parse_function("2z(z-i)").order(1j) == 1


@pytest.mark.parametrize("text", ["z^2-1", "(z-1)/(z+1)", "2z^3/(z-1+2i)", "(z^2+1)^2/(3z)", "z^3+8"])
def test_parsed_function_matches_sympy_evaluation(text):
    f = parse_function(text)
    z = sympy.Symbol("z")
    expr = sympy.sympify(text.replace("^", "**").replace("2z", "2*z").replace("3z", "3*z").replace("2i", "2*I"))
    fn = sympy.lambdify(z, expr, "numpy")
    pts = np.array([0.3 + 0.7j, -1.2 + 0.4j, 2.5 - 1.1j])
    assert np.allclose(f(pts), fn(pts), rtol=1e-12)


@pytest.mark.parametrize("text", ["", "x+1", "z^5-z+1", "0", "z**", "exp(z)"])
def test_parse_errors(text):
    with pytest.raises(ExpressionError):
        parse_function(text)


def test_divisor_degree_is_checked():
    with pytest.raises(ValueError):
        MeromorphicFunction(((0, 1),))
    with pytest.raises(ValueError):
        MeromorphicFunction.constant(0)


def test_tame_symbol_examples():
    z, zm2 = parse_function("z"), parse_function("z-2")
    assert tame_symbol(z, z, 0) == -1
    assert abs(tame_symbol(z, zm2, 0) - (-0.5)) < 1e-15
    assert abs(tame_symbol(z, zm2, 2) - 2) < 1e-15


def test_leading_coefficient_at_infinity_by_limit():
    f = parse_function("3(z-1)^2/(z+2i)")
    w = 1e-7
    ord_inf = f.order(INF)
    numeric = f(1 / w) / w**ord_inf
    assert abs(numeric - f.leading_coefficient(INF)) < 1e-5


_points = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@st.composite
def functions(draw):
    pts = draw(st.lists(_points, min_size=0, max_size=4, unique_by=lambda p: (round(p.real, 3), round(p.imag, 3))))
    mults = [draw(st.integers(-2, 2).filter(lambda m: m != 0)) for _ in pts]
    scale = draw(_points.filter(lambda c: abs(c) > 0.1))
    return MeromorphicFunction.from_finite(list(zip(pts, mults)), scale)


@settings(max_examples=60, deadline=None)
@given(functions(), functions())
def test_weil_reciprocity(f, g):
    pts = [complex(p) for p in f.support + g.support if p != INF]
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            assume(not 1e-12 < abs(a - b) < 1e-3)
    assert abs(weil_product(f, g) - 1) < 1e-7


@settings(max_examples=40, deadline=None)
@given(functions())
def test_log_derivative_matches_finite_difference(f):
    z = np.array([3.7 + 2.9j])
    h = 1e-6
    fd = (f(z + h) - f(z - h)) / (2 * h) / f(z)
    assert np.allclose(f.log_derivative(z), fd, rtol=1e-5, atol=1e-6)


def test_rotation_invariance():
    assert parse_function("z^3-1").is_rotation_invariant(3)
    assert parse_function("z^3").is_rotation_invariant(3)
    assert not parse_function("z").is_rotation_invariant(3)
    assert not parse_function("z^3-z").is_rotation_invariant(3)


def test_function_json_round_trip():
    f = parse_function("(z-1+i)^2/(z+3)")
    assert MeromorphicFunction.from_dict(f.to_dict()) == f


# -- tubes ----------------------------------------------------------------

def _samples(rng, n, eps):
    return np.column_stack([rng.uniform(-0.5, 1.5, n), rng.uniform(-0.5, 1.5, n), rng.uniform(0.5 * eps, 1.5 * eps, n)])


@pytest.mark.parametrize("text,center,period,tau", [
    ("z(z-2)", 0, 1, Fraction(0)),
    ("z(z-2)", 2, 1, Fraction(0)),
    ("z(z-2)", INF, 1, Fraction(0)),
    ("z^3/(z^3-8)", 0, 1, Fraction(1, 3)),
    ("z^3/(z^3-8)", INF, 1, Fraction(-1, 3)),
    ("z^3/(z^3-8)", 2, 3, Fraction(0)),
])
def test_tube_log_is_a_logarithm_with_exact_periods(text, center, period, tau):
    f = parse_function(text)
    tube = Tube(center if center == INF else complex(center), period, tau)
    lg = TubeLog(f, tube)
    X = _samples(np.random.default_rng(1), 50, 0.1)
    assert np.allclose(np.exp(lg.value(X)), f(tube.fiber_point(X)), rtol=1e-12)
    for axis, per in enumerate(lg.periods):
        Y = X.copy()
        Y[:, axis] += 1
        assert np.allclose(lg.value(Y) - lg.value(X), per.value, atol=1e-12)
    assert lg.periods[1].coeffs == (f.order(center),)
    # gradient against central differences
    h = 1e-6
    for axis in range(3):
        Y, W = X.copy(), X.copy()
        Y[:, axis] += h
        W[:, axis] -= h
        fd = (lg.value(Y) - lg.value(W)) / (2 * h)
        assert np.allclose(lg.grad(X)[:, axis], fd, rtol=1e-6, atol=1e-6)


def test_continued_log_agrees_with_structural_branch():
    f = parse_function("z^2(z-1)/(z+0.5i)")
    tube = Tube(0j, 1, Fraction(0))
    lg = TubeLog(f, tube)
    base = (0.0, 0.0, 0.1)
    cl = ContinuedLog(f, tube, base=base, base_log=lg.value(np.array([base]))[0])
    X = _samples(np.random.default_rng(2), 30, 0.1)
    assert np.allclose(cl.value(X), lg.value(X), atol=1e-10)
    assert [p.coeffs for p in cl.periods] == [p.coeffs for p in lg.periods]


def test_twist_must_make_log_single_valued():
    with pytest.raises(ValueError):
        TubeLog(parse_function("z"), Tube(0j, 1, Fraction(1, 3)))


def test_radius_limit():
    f = parse_function("z(z-0.3)")
    tube = Tube(0j)
    assert abs(max_radius(f, tube) - 0.3) < 1e-15
    with pytest.raises(ValueError):
        TubeLog(f, tube).value(np.array([[0.0, 0.0, 0.35]]))


def test_continue_log_refuses_large_steps():
    f = parse_function("z")
    path = np.exp(1j * np.linspace(0, 2 * math.pi, 3))[None, :]
    with pytest.raises(ValueError):
        continue_log(f, path, 0.0)
    fine = np.exp(1j * np.linspace(0, 2 * math.pi, 200))[None, :]
    assert abs(continue_log(f, fine, 0.0)[0, -1] - TWO_PI_I) < 1e-12


def test_flow_primitive_periods():
    prim = FlowPrimitive(Tube(2 + 0j, 3), s0=0.25)
    X = np.array([[0.5, 0.3, 0.1]])
    assert abs(prim.value(X)[0] - TWO_PI_I * (1.5 - 0.25)) < 1e-14
    assert prim.periods[0].coeffs == (3,) and prim.periods[1].is_zero


def test_tube_fiber_points_at_infinity():
    tube = Tube(INF, 1, Fraction(0))
    X = np.array([[0.0, 0.25, 0.1]])
    assert abs(tube.fiber_point(X)[0] - 1 / (0.1j)) < 1e-12
    assert Tube.from_dict(tube.to_dict()) == tube
    assert cmath.isclose(Tube(1j).fiber_point(X)[0], 1j + 0.1j)
