"""Integration of forms over simplices and of Deligne classes over tori."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import forms as F
from .cech import ChartwiseForm, DeligneClass, curvature
from .lattice import Lattice, ReductionResult, lattice_reduce
from .mesh import Flag, IndexMap, Simplex, TorusMesh, enumerate_flags
from .parallel import ordered_map
from .quadrature import triangle_rule, unit_interval_rule


def contract(values: np.ndarray, degree: int, vectors: np.ndarray) -> np.ndarray:
    """Evaluate a k-form on k tangent vectors: ``sum_I c_I det(W[:, I])``.

    ``vectors`` has shape ``(k, 3)``.
    """
    if degree == 0:
        return values[:, 0]
    vectors = np.asarray(vectors, dtype=float)
    out = np.zeros(values.shape[0], dtype=complex)
    for n, I in enumerate(F.BASIS[degree]):
        det = np.linalg.det(vectors[:, list(I)]) if degree > 1 else vectors[0, I[0]]
        if det != 0.0:
            out += values[:, n] * det
    return out


def _simplex_points(simplex: Simplex, radius: float) -> np.ndarray:
    p = simplex.points()
    return np.column_stack([p, np.full(len(p), radius)])


def integrate_simplex(form: F.Form, simplex: Simplex, radius: float = 0.1, order: int = 16) -> complex:
    """Integral of a k-form over an oriented k-simplex of the torus at the given radius."""
    if form.degree != simplex.dim:
        raise ValueError(f"form degree {form.degree} does not match simplex dimension {simplex.dim}")
    P = _simplex_points(simplex, radius)
    if simplex.dim == 0:
        return complex(form.evaluate(P)[0, 0])
    if simplex.dim == 1:
        x, w = unit_interval_rule(order)
        e = P[1] - P[0]
        pts = P[0] + x[:, None] * e
        return complex(np.sum(w * contract(form.evaluate(pts), 1, e[None, :])))
    if simplex.dim == 2:
        ref, w = triangle_rule(order)
        e1, e2 = P[1] - P[0], P[2] - P[0]
        pts = P[0] + ref[:, :1] * e1 + ref[:, 1:] * e2
        return complex(np.sum(w * contract(form.evaluate(pts), 2, np.array([e1, e2]))))
    raise ValueError("simplices of dimension above 2 do not occur on a torus")


def integrate_prism(form, simplex: Simplex, r1: float, r2: float, order: int = 16) -> complex:
    """Integral over ``[r1, r2] x simplex`` oriented as (radial axis, simplex)."""
    if form.degree != simplex.dim + 1:
        raise ValueError("form degree must be simplex dimension plus one")
    xr, wr = unit_interval_rule(order)
    radii = r1 + (r2 - r1) * xr
    dr = np.array([0.0, 0.0, r2 - r1])
    P = simplex.points()
    if simplex.dim == 0:
        pts = np.column_stack([np.full(order, P[0, 0]), np.full(order, P[0, 1]), radii])
        return complex(np.sum(wr * contract(form.evaluate(pts), 1, dr[None, :])))
    if simplex.dim == 1:
        base, wb = unit_interval_rule(order)
        e = np.array([*(P[1] - P[0]), 0.0])
        uv = P[0] + base[:, None] * e[:2]
        vecs = np.array([dr, e])
    else:
        ref, wb = triangle_rule(order)
        e1 = np.array([*(P[1] - P[0]), 0.0])
        e2 = np.array([*(P[2] - P[0]), 0.0])
        uv = P[0] + ref[:, :1] * e1[:2] + ref[:, 1:] * e2[:2]
        vecs = np.array([dr, e1, e2])
    pts = np.column_stack([np.repeat(uv, order, axis=0), np.tile(radii, len(uv))])
    weights = np.repeat(wb, order) * np.tile(wr, len(uv))
    return complex(np.sum(weights * contract(form.evaluate(pts), form.degree, vecs)))


@dataclass
class DeligneIntegral:
    value: complex
    lattice: Lattice
    terms: dict

    def reduce(self, tolerance: float = 1e-8, bound: int = 10_000) -> ReductionResult:
        return lattice_reduce(self.value, self.lattice, bound, tolerance)


def integrate_deligne(
    c: DeligneClass,
    mesh: TorusMesh,
    index_map: IndexMap | Callable,
    radius: float = 0.1,
    order: int = 16,
    top: Sequence[Simplex] | None = None,
    top_signs: Sequence[int] | None = None,
) -> DeligneIntegral:
    """Sum over flags of the integral of ``theta^{n-1-i}`` on the smallest simplex.

    The chart tuple for a flag ``sigma^{n-1-i} < ... < sigma^{n-1}`` is
    ``(iota(sigma^{n-1}), ..., iota(sigma^{n-1-i}))``; each term carries the
    orientation sign of the flag.
    """
    n = c.degree
    if top is None and mesh is not None and n != 3:
        raise ValueError(f"a degree-{n} class integrates over a {n - 1}-dimensional sub-mesh; pass top=")
    iota = index_map if callable(index_map) else index_map.__call__
    terms: dict = {}
    total = 0.0 + 0.0j
    for i in range(n):
        if i == 0 and top is not None:
            signs = top_signs if top_signs is not None else [1] * len(top)
            flags = [Flag((s,), sg) for s, sg in zip(top, signs)]
        else:
            flags = enumerate_flags(mesh, n, i, top, top_signs)

        def term(fl, i=i):
            charts = tuple(iota(s) for s in reversed(fl.simplices))
            form = c.forms[n - 1 - i](charts)
            if form.is_zero:
                return 0.0j
            return fl.sign * integrate_simplex(form, fl.simplices[0], radius, order)

        vals = ordered_map(term, flags)
        partial = complex(sum(vals))
        terms[f"F({i})"] = partial
        total += partial
    return DeligneIntegral(total, c.lattice, terms)


@dataclass
class StokesReport:
    boundary: complex
    interior: complex
    reduction: ReductionResult

    @property
    def residual(self) -> float:
        return self.reduction.residual

    @property
    def passed(self) -> bool:
        return self.reduction.passed

    def to_dict(self) -> dict:
        return {
            "boundary": [self.boundary.real, self.boundary.imag],
            "interior": [self.interior.real, self.interior.imag],
            "reduction": self.reduction.to_dict(),
        }


def stokes_check(
    c: DeligneClass,
    mesh: TorusMesh,
    index_map: IndexMap,
    r1: float,
    r2: float,
    order: int = 16,
    tolerance: float = 1e-7,
    points: Sequence[Sequence[float]] | None = None,
    row: int = 0,
) -> StokesReport:
    """Compare ``int_{Y2} c - int_{Y1} c`` with ``int_Z Omega(c)`` modulo the lattice.

    For n = 3 the region is the shell ``[r1, r2] x T``; for n = 2 the annulus
    ``[r1, r2] x`` (longitude cycle ``row``); for n = 1 the straight segment
    between two given points ``points = (p1, p2)`` (``r1, r2`` unused).
    """
    if not r1 < r2 and c.degree > 1:
        raise ValueError("need r1 < r2")
    for r in (r1, r2):
        if c.degree > 1 and not c.cover.radial[0] <= r <= c.cover.radial[1]:
            raise ValueError(f"radius {r} lies outside the cover's radial range {c.cover.radial}")
    omega = curvature(c)
    n = c.degree
    if n == 1:
        if points is None:
            raise ValueError("degree 1 needs two points")
        p1, p2 = (np.asarray(p, dtype=float) for p in points)
        # flag formula on the 0-chain p2 - p1, each point at its own radius
        bnd = 0.0j
        for p, sign in ((p1, -1), (p2, 1)):
            cid = c.cover.chart_containing(p)
            bnd += sign * complex(c.forms[0]((cid,)).evaluate(p[None, :])[0, 0])
        x, w = unit_interval_rule(max(order, 24))
        e = p2 - p1
        pts = p1 + x[:, None] * e
        interior = complex(np.sum(w * contract(omega.evaluate(pts), 1, e[None, :])))
    else:
        top = None if n == 3 else mesh.longitude_cycle(row)
        I1 = integrate_deligne(c, mesh, index_map, r1, order, top).value
        I2 = integrate_deligne(c, mesh, index_map, r2, order, top).value
        bnd = I2 - I1
        cells = mesh.triangles if n == 3 else top
        interior = 0.0j
        for s in cells:
            interior += integrate_prism(omega.chart_forms[index_map(s)], s, r1, r2, order)
    red = lattice_reduce(bnd - interior, c.lattice, tolerance=tolerance)
    return StokesReport(bnd, interior, red)


def integrate_global(omega: ChartwiseForm, mesh: TorusMesh, index_map: IndexMap, radius: float, order: int = 16) -> complex:
    """Integral of a global 2-form over the torus at a fixed radius."""
    total = 0.0j
    for s in mesh.triangles:
        total += integrate_simplex(omega.chart_forms[index_map(s)], s, radius, order)
    return total


def max_abs_on_samples(form, pts) -> float:
    return float(np.max(np.abs(form.evaluate(pts)))) if len(pts) else 0.0


__all__ = [
    "contract",
    "integrate_simplex",
    "integrate_prism",
    "integrate_deligne",
    "stokes_check",
    "integrate_global",
    "DeligneIntegral",
    "StokesReport",
]
