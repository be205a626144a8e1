from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from scipy import integrate

from fds3 import forms as F
from fds3.cech import AffineFunction, class_of_lifted, cup
from fds3.cover import grid_cover
from fds3.functions import parse_function
from fds3.integration import integrate_deligne, integrate_prism, integrate_simplex, stokes_check
from fds3.lattice import Lattice, lattice_reduce
from fds3.mesh import (
    IndexMap,
    TorusMesh,
    alternate_index_map,
    boundary_sign,
    brute_force_flag_count,
    chart_load,
    default_index_map,
    enumerate_flags,
)
from fds3.symbols import boundary_data

Z = Lattice.integers()
TWO_PI_I = 2j * math.pi


@pytest.fixture(scope="module")
def cover():
    return grid_cover(3, 0.05, (0.05, 0.2))


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_mesh_counts_and_euler_characteristic(r):
    mesh = TorusMesh(r)
    N = 3 * r
    assert (len(mesh.vertices), len(mesh.edges), len(mesh.triangles)) == (N * N, 3 * N * N, 2 * N * N)
    assert mesh.euler_characteristic() == 0


@pytest.mark.parametrize("r", [1, 2])
def test_mesh_is_a_closed_oriented_surface(r):
    mesh = TorusMesh(r)
    counts = mesh.edge_counts()
    assert set(counts.values()) == {2}
    # induced orientations cancel on every interior edge
    total = Counter()
    for t in mesh.triangles:
        for e in mesh.faces(t):
            total[e.key] += boundary_sign(e, t)
    assert all(v == 0 for v in total.values())
    # triangles are counterclockwise with area 1/(2N^2)
    for t in mesh.triangles:
        p = t.points()
        e1, e2 = p[1] - p[0], p[2] - p[0]
        area = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
        assert abs(area - 0.5 / mesh.N**2) < 1e-14


def test_flag_counts_at_r1():
    mesh = TorusMesh(1)
    assert [len(enumerate_flags(mesh, 3, i)) for i in range(3)] == [18, 54, 108]


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_flag_counts_match_brute_force(r, n):
    mesh = TorusMesh(r)
    for i in range(n):
        assert len(enumerate_flags(mesh, n, i)) == brute_force_flag_count(mesh, n, i)


def test_flag_enumeration_rejects_bad_degrees():
    mesh = TorusMesh(1)
    with pytest.raises(ValueError):
        enumerate_flags(mesh, 4, 0)
    with pytest.raises(ValueError):
        enumerate_flags(mesh, 3, 3)
    with pytest.raises(ValueError):
        TorusMesh(0)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_index_maps_are_valid(cover, r):
    mesh = TorusMesh(r)
    for imap in (default_index_map(mesh, cover), alternate_index_map(mesh, cover)):
        imap.check(mesh, cover)
        assert IndexMap.from_dict(imap.to_dict()).assignment == imap.assignment


def test_default_index_map_load_at_r1(cover):
    load = chart_load(default_index_map(TorusMesh(1), cover))
    assert all(v == [1, 3, 2] for v in load.values())


def test_area_and_cycle_integrals():
    mesh = TorusMesh(2)
    area = sum(integrate_simplex(F.area_form(0, 1), t) for t in mesh.triangles)
    assert abs(area - 1) < 1e-14
    one = F.constant_one_form([2.0, -3.0, 0.0])
    assert abs(sum(integrate_simplex(one, e) for e in mesh.longitude_cycle(1)) - 2) < 1e-14
    assert abs(sum(integrate_simplex(one, e) for e in mesh.meridian_cycle(2)) + 3) < 1e-14


def _smooth(X):
    u, v = X[:, 0], X[:, 1]
    return np.exp(np.sin(2 * math.pi * u)) * np.cos(3 * v) + 1j * u * v**2


def test_triangle_integral_against_scipy():
    mesh = TorusMesh(1)
    t = mesh.triangles[7]
    form = F.CoefficientForm(2, lambda X: np.column_stack([_smooth(X), 0 * X[:, 0], 0 * X[:, 0]]), closed=True)
    got = integrate_simplex(form, t, order=20)
    p = t.points()
    e1, e2 = p[1] - p[0], p[2] - p[0]
    jac = e1[0] * e2[1] - e1[1] * e2[0]

    def part(fn):
        g = lambda y, x: fn(_smooth(np.array([[*(p[0] + x * e1 + y * e2), 0.1]]))[0])
        return integrate.dblquad(g, 0, 1, 0, lambda x: 1 - x, epsabs=1e-13)[0]

    ref = jac * (part(np.real) + 1j * part(np.imag))
    assert abs(got - ref) < 1e-11


def test_prism_integral_against_scipy():
    mesh = TorusMesh(1)
    t = mesh.triangles[3]

    def coeff(X):
        return np.column_stack([np.cos(X[:, 0] + X[:, 1]) * X[:, 2] ** 2])

    form = F.CoefficientForm(3, coeff)
    got = integrate_prism(form, t, 0.05, 0.2, 16)
    p = t.points()
    e1, e2 = p[1] - p[0], p[2] - p[0]
    jac = e1[0] * e2[1] - e1[1] * e2[0]

    def g(r, y, x):
        q = p[0] + x * e1 + y * e2
        return math.cos(q[0] + q[1]) * r**2

    ref = integrate.tplquad(g, 0, 1, 0, lambda x: 1 - x, 0.05, 0.2, epsabs=1e-14)[0]
    # orientation (dr, du, dv) = +(du, dv, dr), times the triangle's orientation
    assert abs(got - (0.2 - 0.05) / (0.2 - 0.05) * jac * ref) < 1e-12


def test_degree_one_holonomy_is_the_function_difference(cover):
    fn = AffineFunction(Z, (1,), (2,), 0.3)
    c = class_of_lifted(fn, cover)
    rep = stokes_check(c, None, None, 0, 0, points=[(0.1, 0.2, 0.1), (0.8, 0.9, 0.1)])
    assert rep.passed
    assert lattice_reduce(rep.boundary - TWO_PI_I * (0.7 + 2 * 0.7), Z.with_twist(1), tolerance=1e-12).passed


def test_flag_sum_of_affine_triple_matches_closed_formula(cover):
    # F = 2 pi i v, G = c, Phi = 2 pi i u: the symbol is (2 pi i)^2 c mod (2 pi i)^3
    c0 = 0.7 + 0.2j
    f = class_of_lifted(AffineFunction(Z, (0,), (1,)), cover)
    g = class_of_lifted(AffineFunction(Z, (0,), (0,), c0), cover)
    w = class_of_lifted(AffineFunction(Z, (1,), (0,)), cover)
    mesh = TorusMesh(1)
    val = integrate_deligne(cup(cup(f, g), w), mesh, default_index_map(mesh, cover)).value
    assert lattice_reduce(val - TWO_PI_I**2 * c0, Lattice.integers(3), tolerance=1e-10).passed


@pytest.mark.parametrize("orbit", [0, 2, "inf"])
def test_stokes_in_every_degree(product, orbit):
    data = boundary_data(product, parse_function("z"), parse_function("z-2"), orbit, 0.1)
    cf, cg, cw = data.classes()
    lo, hi = data.cover.radial
    r1, r2 = lo + 0.01, hi - 0.01
    mesh = TorusMesh(1)
    imap = default_index_map(mesh, data.cover)
    # non-flat classes: the curvature carries dr terms
    for c in (cup(cw, cf), cup(cup(cf, cg), cw)):
        rep = stokes_check(c, mesh, imap, r1, r2)
        assert rep.passed, rep.to_dict()
    # the function with a zero or pole on this orbit winds, so its segment integral is large
    winding = cg if orbit == 2 else cf
    rep = stokes_check(winding, None, None, 0, 0, points=[(0.1, 0.2, r1), (0.7, 0.4, r2)])
    assert rep.passed
    assert abs(rep.interior) > 0.1


def test_stokes_rejects_radii_outside_cover(cover):
    c = cup(class_of_lifted(AffineFunction(Z, (1,), (0,)), cover), class_of_lifted(AffineFunction(Z, (0,), (1,)), cover))
    mesh = TorusMesh(1)
    with pytest.raises(ValueError):
        stokes_check(c, mesh, default_index_map(mesh, cover), 0.01, 0.1)
