from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fds3.lattice import (
    Lattice,
    lattice_reduce,
    looks_rational,
    product_lattice,
    round_to_lattice,
    twist_factor,
)

SQRT2 = math.sqrt(2)
CUBE = (2j * math.pi) ** 3


@pytest.mark.parametrize("n", range(7))
def test_twist_factor_matches_complex_power(n):
    assert abs(twist_factor(n) - (2j * math.pi) ** n) <= 1e-12 * abs(twist_factor(n))


def test_generators_are_sorted_and_validated():
    assert Lattice((SQRT2, 1.0)).generators == (1.0, SQRT2)
    with pytest.raises(ValueError):
        Lattice((1.0, 2.0, 3.0, 5.0))
    with pytest.raises(ValueError):
        Lattice((0.0,))
    with pytest.raises(ValueError):
        Lattice((1.0,), -1)


def test_reduce_integer_multiple():
    res = lattice_reduce(CUBE * 5, Lattice.integers(3))
    assert res.coefficients == (5,)
    assert res.residual < 1e-12
    assert res.verdict == "pass"


def test_reduce_zero():
    res = lattice_reduce(0.0, Lattice((1.0, SQRT2), 3))
    assert res.coefficients == (0, 0)
    assert res.residual == 0.0


def test_reduce_dense_rank_two():
    lat = Lattice((1.0, SQRT2), 3)
    res = lattice_reduce(CUBE * (3 + 2 * SQRT2), lat, bound=10**6)
    assert res.coefficients == (3, 2)
    assert res.residual < 1e-9


def test_reduce_dense_rank_three():
    lat = Lattice((1.0, SQRT2, math.sqrt(3)), 3)
    res = lattice_reduce(lat.value((4, -7, 2)), lat, bound=50)
    assert res.coefficients == (4, -7, 2)
    assert res.passed


def test_reduce_off_line_fails():
    # a real part cannot be absorbed by (2 pi i)^3 times a real lattice
    res = lattice_reduce(CUBE * 2 + 1.0, Lattice((1.0, SQRT2), 3), bound=100)
    assert res.verdict == "fail"


def test_reduce_dense_small_bound_is_inconclusive():
    res = lattice_reduce(CUBE * math.pi, Lattice((1.0, SQRT2), 3), bound=3, tolerance=1e-9)
    assert res.verdict == "inconclusive"
    assert res.residual > 1e-9


@settings(max_examples=200, deadline=None)
@given(st.integers(-10**6, 10**6), st.floats(-0.4, 0.4))
def test_rank_one_reduction_keeps_fractional_part(k, frac):
    lat = Lattice.integers(3)
    res = lattice_reduce(CUBE * (k + frac), lat)
    assert res.coefficients == (k,)
    assert abs(res.reduced - CUBE * frac) < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_rank_two_round_trip(a, b):
    lat = Lattice((1.0, SQRT2), 3)
    res = lattice_reduce(lat.value((a, b)), lat)
    assert res.coefficients == (a, b)
    assert res.residual < 1e-9


def test_element_arithmetic_and_products():
    Z1 = Lattice.integers(1)
    L2 = Lattice((1.0, SQRT2), 2)
    x = Z1.element((3,))
    y = L2.element((1, -2))
    assert (x + x).coeffs == (6,)
    assert (x - x).is_zero
    assert (-y).coeffs == (-1, 2)
    prod = x * y
    assert prod.lattice == L2.with_twist(3)
    assert prod.coeffs == (3, -6)
    assert abs(prod.value - x.value * y.value) < 1e-9 * abs(prod.value)
    assert product_lattice(Z1, L2) == L2.with_twist(3)
    with pytest.raises(ValueError):
        y * y
    with pytest.raises(ValueError):
        x + Lattice.integers(2).element((1,))


def test_round_to_lattice_raises_off_lattice():
    assert round_to_lattice(2j * math.pi * 4, Lattice.integers(1)).coeffs == (4,)
    with pytest.raises(ValueError):
        round_to_lattice(2j * math.pi * 4.3, Lattice.integers(1))


def test_lattice_json_round_trip():
    lat = Lattice((1.0, SQRT2), 2)
    assert Lattice.from_dict(lat.to_dict()) == lat


def test_looks_rational():
    assert looks_rational(0.75)
    assert not looks_rational(SQRT2)
