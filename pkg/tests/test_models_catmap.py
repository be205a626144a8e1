from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fds3.catmap import apply, cat_map_fixed_point_count, count_table, enumerate_periodic_points, matrix_power
from fds3.models import (
    MODEL_NAMES,
    DomainError,
    canonical_form_check,
    circle_orbit,
    flow_tangency_check,
    make_model,
    monodromy_period,
    period_group,
)

SQRT2, SQRT3 = math.sqrt(2), math.sqrt(3)


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_canonical_form_identities(name):
    model = make_model(name)
    rep = canonical_form_check(model, 10_000, seed=0)
    assert len(model.flows) == 2
    assert rep.passed, rep.to_dict()
    assert rep.leaf_residual < 1e-9 and rep.d_omega_residual < 1e-9
    assert all(v < 1e-9 for v in rep.flow_residuals.values())


def test_type3_integrability():
    rep = canonical_form_check(make_model("t3_type3"), 10_000)
    assert rep.integrability_residual is not None and rep.integrability_residual < 1e-10


@pytest.mark.parametrize("name", ["product", "t3_linear", "t3_type3"])
def test_perturbed_form_is_detected(name):
    model = make_model(name)
    scaled = lambda X: 1.01 * model.omega(X)
    rep = canonical_form_check(model, 1000, omega=scaled)
    assert not rep.passed
    assert max(rep.flow_residuals.values()) > 5e-3


def test_shear_breaks_closedness():
    model = make_model("product")

    def omega(X):
        w = model.omega(X).copy()
        w[:, 0] += 0.1 * X[:, 2]
        return w

    def jac(X):
        J = model.omega_jacobian(X).copy()
        J[:, 0, 2] += 0.1
        return J

    rep = canonical_form_check(model, 500, omega=omega, omega_jacobian=jac)
    assert rep.d_omega_residual > 0.05 and not rep.passed


@pytest.mark.parametrize("name,expected", [
    ("product", (1.0,)),
    ("rotation", (1.0,)),
    ("t3_type2", ()),
    ("t3_type3", (1.0, SQRT2)),
    ("t3_linear", (1.0, SQRT2, SQRT3)),
])
def test_period_groups(name, expected):
    rep = period_group(make_model(name))
    assert len(rep.lattice.generators) == len(expected)
    assert all(abs(a - b) < 1e-8 for a, b in zip(rep.lattice.generators, expected))
    assert rep.max_error < 1e-8


def test_closed_orbits_are_flow_lines():
    for name in MODEL_NAMES:
        model = make_model(name)
        for orbit in model.closed_orbits:
            rep = flow_tangency_check(model, orbit)
            assert rep.passed, (name, rep.to_dict())


def test_non_orbit_is_rejected():
    model = make_model("t3_linear")
    rep = flow_tangency_check(model, circle_orbit("theta1 circle", [0.0, 0.1, 0.2], 0))
    assert not rep.passed


def test_singular_leaves_raise():
    model = make_model("t3_type2")
    with pytest.raises(DomainError):
        model.evaluate_omega(np.array([[0.1, 0.2, 0.0]]))


def test_parameter_validation():
    with pytest.raises(ValueError):
        make_model("t3_linear", rho_m=0.5, rho_l=1.5)
    with pytest.raises(ValueError):
        make_model("nonexistent")


def test_monodromy_periods():
    assert monodromy_period(3, 1.0) == 3
    assert monodromy_period(4, 2.0) == 4
    rot = make_model("rotation", k=3)
    tube = rot.orbit_tube(0)
    assert tube.period == 1 and tube.tau == Fraction(1, 3)
    assert rot.orbit_tube(1).period == 3
    assert rot.orbit_tube("inf").tau == Fraction(-1, 3)


def test_model_info_is_serializable():
    import json

    for name in MODEL_NAMES:
        json.dumps(make_model(name).info())


# -- cat map --------------------------------------------------------------

CAT = ((3, 1), (2, 1))


def test_cat_map_fixed_points():
    assert cat_map_fixed_point_count(CAT, 1) == 2
    assert sorted(enumerate_periodic_points(CAT, 1)) == [(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(0))]


@pytest.mark.parametrize("A", [CAT, ((2, 1), (1, 1)), ((1, 1), (1, 0)), ((0, 1), (1, 3))])
def test_counts_equal_brute_force(A):
    for row in count_table(A, 6):
        assert row["count"] == row["brute_force"], row


def test_periodic_points_are_periodic():
    for n in (1, 2, 3):
        P = matrix_power(CAT, n)
        for p in enumerate_periodic_points(CAT, n):
            x = p
            for _ in range(n):
                x = apply(CAT, x)
            assert x == p
        assert P == matrix_power(CAT, n)


def _hyperbolic(a, b, c, d) -> bool:
    det = a * d - b * c
    return (det == 1 and abs(a + d) > 2) or (det == -1 and a + d != 0)


HYPERBOLIC = [((a, b), (c, d)) for a, b, c, d in itertools.product(range(-3, 4), repeat=4) if _hyperbolic(a, b, c, d)]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(HYPERBOLIC), st.integers(1, 3))
def test_random_hyperbolic_matrices(A, n):
    assert cat_map_fixed_point_count(A, n) == len(enumerate_periodic_points(A, n))


@pytest.mark.parametrize("A", [((1, 0), (0, 1)), ((2, 0), (0, 1)), ((1, 1), (0, 1)), "nope"])
def test_invalid_matrices(A):
    with pytest.raises(ValueError):
        cat_map_fixed_point_count(A, 1)
