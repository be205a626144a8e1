"""Explicit foliated dynamical systems on 3-manifolds.

Every model stores its canonical 1-form ``omega`` as coefficient functions
in model coordinates together with their Jacobian, the flow fields that are
declared for it, spanning vector fields of the leaf planes, declared closed
orbits, and generator loops for the period group.

Coordinates:

* ``product`` and ``rotation``: ``(x, y, s)`` with fiber point ``z = x + iy``
  and suspension time ``s``.
* ``t3_*``: angles ``(theta1, theta2, theta3)`` on the 3-torus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .functions import INF
from .lattice import Lattice, looks_rational
from .quadrature import unit_interval_rule
from .tubes import Tube

TWO_PI = 2 * math.pi


class DomainError(ValueError):
    """Raised when evaluating on the singular locus of a canonical form."""


@dataclass
class ClosedOrbit:
    name: str
    point: Callable  # t in [0,1) -> (N,3) model coordinates
    tangent: Callable  # t -> (N,3) derivative of the parametrization
    period: float = 1.0
    epsilon: float = 0.1
    tube_chart: Callable | None = None  # (s, theta, rho) -> model coordinates
    meridian: str = "counterclockwise fiber circle of radius epsilon"
    longitude: str = "curve of constant meridian angle, along the flow"
    fiber_point: object = None
    tube: Tube | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "period": self.period, "epsilon": self.epsilon,
               "meridian": self.meridian, "longitude": self.longitude}
        if self.tube is not None:
            out["tube"] = self.tube.to_dict()
        return out


@dataclass
class GeneratorLoop:
    name: str
    point: Callable
    tangent: Callable
    declared: float


@dataclass
class FDS3Model:
    name: str
    family: str
    params: dict
    type_label: str
    omega: Callable  # X -> (N,3)
    omega_jacobian: Callable  # X -> (N,3,3) with [:, i, j] = d omega_i / d x_j
    flows: list
    leaf_tangents: Callable  # X -> (N,2,3)
    sampler: Callable  # (rng, n) -> X in M0
    closed_orbits: list = field(default_factory=list)
    loops: list = field(default_factory=list)
    infinite_leaves: list = field(default_factory=list)
    orbit_flow: int = 0
    domain_check: Callable | None = None
    integrability_form: Callable | None = None  # X -> (coeffs, jacobian) of a defining form of the foliation
    fibred: bool = False
    monodromy_order: int = 1

    def evaluate_omega(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.domain_check is not None:
            self.domain_check(X)
        return self.omega(X)

    @property
    def period_lattice(self) -> Lattice:
        return lattice_from_values([lp.declared for lp in self.loops])

    def info(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "params": self.params,
            "type_label": self.type_label,
            "flows": [name for name, _ in self.flows],
            "closed_orbits": [o.to_dict() for o in self.closed_orbits],
            "infinite_leaves": self.infinite_leaves,
            "period_group": self.period_lattice.to_dict()["generators"],
        }

    def orbit_tube(self, fiber_point, epsilon: float = 0.1) -> Tube:
        """Tube data for the closed orbit through a fiber point of a fibred model."""
        if not self.fibred:
            raise ValueError(f"model {self.name} has no fiber coordinate")
        k = self.monodromy_order
        if isinstance(fiber_point, str) and fiber_point == INF:
            return Tube(INF, 1, Fraction(-1, k) if k > 1 else Fraction(0))
        z0 = complex(fiber_point)
        if abs(z0) < 1e-14:
            return Tube(0j, 1, Fraction(1, k) if k > 1 else Fraction(0))
        return Tube(z0, k, Fraction(0))


def lattice_from_values(values) -> Lattice:
    gens = []
    for v in values:
        if abs(v) < 1e-14:
            continue
        if any(abs(abs(v) - abs(g)) < 1e-12 for g in gens):
            continue
        gens.append(float(v))
    return Lattice(tuple(gens), 0)


def _const(vec) -> Callable:
    vec = np.asarray(vec, dtype=float)
    return lambda X: np.broadcast_to(vec, (len(X), 3)).copy()


def _zero_jac(X):
    return np.zeros((len(X), 3, 3))


def _circle_loop(name, fixed, axis, declared) -> GeneratorLoop:
    fixed = np.asarray(fixed, dtype=float)

    def point(t):
        t = np.asarray(t, dtype=float)
        X = np.repeat(fixed[None, :], len(t), axis=0)
        X[:, axis] = fixed[axis] + t
        return X

    def tangent(t):
        out = np.zeros((len(np.atleast_1d(t)), 3))
        out[:, axis] = 1.0
        return out

    return GeneratorLoop(name, point, tangent, declared)


def _axis_orbit(name, fixed, axis, epsilon=0.1, **kw) -> ClosedOrbit:
    loop = _circle_loop(name, fixed, axis, 1.0)
    return ClosedOrbit(name, loop.point, loop.tangent, epsilon=epsilon, **kw)


def _fiber_sampler(radius: float = 3.0):
    def sample(rng, n):
        x = rng.uniform(-radius, radius, n)
        y = rng.uniform(-radius, radius, n)
        s = rng.uniform(0.0, 1.0, n)
        return np.column_stack([x, y, s])

    return sample


def _fiber_leaf(X):
    out = np.zeros((len(X), 2, 3))
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = 1.0
    return out


def _fibred_orbit(model_k: int, z0) -> ClosedOrbit:
    if isinstance(z0, str):
        name = "orbit through infinity"
        fixed = np.array([np.inf, np.inf, 0.0])
    else:
        z0 = complex(z0)
        name = f"orbit through {z0:g}"
        fixed = np.array([z0.real, z0.imag, 0.0])
    zeta = np.exp(2j * math.pi / model_k)
    period = 1 if (isinstance(z0, str) or abs(z0) < 1e-14 or model_k == 1) else model_k

    def point(t):
        t = np.asarray(t, dtype=float) * period
        X = np.repeat(fixed[None, :], len(t), axis=0)
        if not isinstance(z0, str):
            # fiber coordinate in the fundamental domain s in [0, 1)
            z = z0 * zeta ** np.floor(t)
            X[:, 0], X[:, 1] = z.real, z.imag
        X[:, 2] = np.mod(t, 1.0)
        return X

    def tangent(t):
        out = np.zeros((len(np.atleast_1d(t)), 3))
        out[:, 2] = period
        return out

    return ClosedOrbit(name, point, tangent, period=float(period), fiber_point=z0)


def make_product_model() -> FDS3Model:
    """Fiber the sphere, identity monodromy, flow ``d/ds`` and ``omega = ds``."""

    def rotating_flow(X):
        out = np.zeros_like(X)
        out[:, 0] = -0.5 * X[:, 1]
        out[:, 1] = 0.5 * X[:, 0]
        out[:, 2] = 1.0
        return out

    return FDS3Model(
        name="product",
        family="product_sphere",
        params={},
        type_label="I",
        omega=_const([0.0, 0.0, 1.0]),
        omega_jacobian=_zero_jac,
        flows=[("suspension", _const([0.0, 0.0, 1.0])), ("suspension plus fiber rotation", rotating_flow)],
        leaf_tangents=_fiber_leaf,
        sampler=_fiber_sampler(),
        closed_orbits=[_fibred_orbit(1, 3.0)],
        loops=[_circle_loop("flow circle", [3.0, 0.0, 0.0], 2, 1.0)],
        fibred=True,
        monodromy_order=1,
    )


def make_rotation_model(k: int) -> FDS3Model:
    """Mapping torus of ``z -> exp(2*pi*i/k) z`` on the sphere with the suspension flow."""
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ValueError("rotation order k must be an integer >= 2")
    k = int(k)

    def sheared_flow(X):
        out = np.zeros_like(X)
        out[:, 0] = 0.3 * np.sin(TWO_PI * X[:, 2]) * X[:, 0]
        out[:, 1] = 0.3 * np.sin(TWO_PI * X[:, 2]) * X[:, 1]
        out[:, 2] = 1.0
        return out

    return FDS3Model(
        name=f"rotation{k}",
        family="rotation_mapping_torus",
        params={"k": k},
        type_label="I",
        omega=_const([0.0, 0.0, 1.0]),
        omega_jacobian=_zero_jac,
        flows=[("suspension", _const([0.0, 0.0, 1.0])), ("suspension plus radial fiber field", sheared_flow)],
        leaf_tangents=_fiber_leaf,
        sampler=_fiber_sampler(),
        closed_orbits=[_fibred_orbit(k, 0j), _fibred_orbit(k, 1.0)],
        loops=[_circle_loop("flow circle through 0", [0.0, 0.0, 0.0], 2, 1.0)],
        fibred=True,
        monodromy_order=k,
    )


def monodromy_period(k: int, z0: complex, max_iter: int = 1000) -> int:
    """Smallest n with ``zeta^n z0 = z0`` by iterating the monodromy."""
    zeta = np.exp(2j * math.pi / k)
    z = complex(z0)
    w = z
    for n in range(1, max_iter + 1):
        w = w * zeta
        if abs(w - z) < 1e-12 * max(1.0, abs(z)):
            return n
    raise RuntimeError("no period found")


def _check_irrational(*values: float) -> None:
    if all(looks_rational(v, 100) for v in values):
        raise ValueError(
            f"parameters {values} are ratios of small integers; the model needs an irrational parameter"
        )


def make_t3_linear_model(rho_m: float, rho_l: float) -> FDS3Model:
    """Linear foliation of the 3-torus with four declared closed orbits."""
    _check_irrational(rho_m, rho_l)

    def flow2(X):
        s1 = np.sin(TWO_PI * X[:, 0])
        s2 = np.sin(TWO_PI * X[:, 1])
        return np.column_stack([s1, s2, 1 - rho_m * s1 - rho_l * s2])

    def leaf(X):
        out = np.zeros((len(X), 2, 3))
        out[:, 0] = [1.0, 0.0, -rho_m]
        out[:, 1] = [0.0, 1.0, -rho_l]
        return out

    def sampler(rng, n):
        return rng.uniform(0.0, 1.0, (n, 3))

    orbits = [
        _axis_orbit(name, [a, b, 0.0], 2)
        for name, a, b in [("gamma1", 0.0, 0.0), ("gamma2", 0.5, 0.0), ("gamma2'", 0.0, 0.5), ("gamma3", 0.5, 0.5)]
    ]
    return FDS3Model(
        name="t3_linear",
        family="t3_linear",
        params={"rho_m": rho_m, "rho_l": rho_l},
        type_label="II",
        omega=_const([rho_m, rho_l, 1.0]),
        omega_jacobian=_zero_jac,
        flows=[("vertical", _const([0.0, 0.0, 1.0])), ("modified", flow2)],
        leaf_tangents=leaf,
        sampler=sampler,
        closed_orbits=orbits,
        loops=[
            _circle_loop("theta1 circle", [0.0, 0.0, 0.0], 0, rho_m),
            _circle_loop("theta2 circle", [0.0, 0.0, 0.0], 1, rho_l),
            _circle_loop("theta3 circle", [0.0, 0.0, 0.0], 2, 1.0),
        ],
        orbit_flow=1,
    )


def _singular_check(margin: float = 1e-3) -> Callable:
    def check(X):
        t = np.mod(X[:, 2], 0.5)
        dist = np.minimum(t, 0.5 - t)
        if np.any(dist < margin):
            raise DomainError(f"theta3 within {margin} of the singular leaves theta3 in {{0, 1/2}}")

    return check


def _away_from_leaves(rng, n, margin=1e-3):
    X = rng.uniform(0.0, 1.0, (n, 3))
    t = rng.uniform(margin, 0.5 - margin, n)
    X[:, 2] = t + 0.5 * rng.integers(0, 2, n)
    return X


def _cosec_omega(extra: tuple[float, float]) -> tuple[Callable, Callable]:
    a, b = extra

    def omega(X):
        out = np.zeros((len(X), 3))
        out[:, 0] = a
        out[:, 1] = b
        out[:, 2] = 1.0 / np.sin(TWO_PI * X[:, 2])
        return out

    def jac(X):
        out = np.zeros((len(X), 3, 3))
        s = np.sin(TWO_PI * X[:, 2])
        out[:, 2, 2] = -TWO_PI * np.cos(TWO_PI * X[:, 2]) / s**2
        return out

    return omega, jac


def make_t3_type2_model() -> FDS3Model:
    """Flow ``(cos 2 pi theta3, 0, sin 2 pi theta3)`` with two compact non-transverse leaves."""
    omega, jac = _cosec_omega((0.0, 0.0))

    def flow(X):
        return np.column_stack([np.cos(TWO_PI * X[:, 2]), np.zeros(len(X)), np.sin(TWO_PI * X[:, 2])])

    def flow_vertical(X):
        return np.column_stack([np.zeros(len(X)), np.zeros(len(X)), np.sin(TWO_PI * X[:, 2])])

    def leaf(X):
        out = np.zeros((len(X), 2, 3))
        out[:, 0, 0] = 1.0
        out[:, 1, 1] = 1.0
        return out

    return FDS3Model(
        name="t3_type2",
        family="t3_type2",
        params={},
        type_label="III-2",
        omega=omega,
        omega_jacobian=jac,
        flows=[("declared", flow), ("leafwise modification", flow_vertical)],
        leaf_tangents=leaf,
        sampler=_away_from_leaves,
        closed_orbits=[],
        loops=[
            _circle_loop("theta1 circle in X1", [0.0, 0.0, 0.25], 0, 0.0),
            _circle_loop("theta2 circle in X1", [0.0, 0.0, 0.25], 1, 0.0),
            _circle_loop("theta1 circle in X2", [0.0, 0.0, 0.75], 0, 0.0),
        ],
        infinite_leaves=["theta3 = 0", "theta3 = 1/2"],
        domain_check=_singular_check(),
    )


def make_t3_type3_model(rho: float) -> FDS3Model:
    """Foliation ``ker(sin(2 pi theta3)(dtheta1 + rho dtheta2) + dtheta3)`` with two flows."""
    _check_irrational(rho)
    omega, jac = _cosec_omega((1.0, rho))

    def flow2(X):
        s2 = np.sin(TWO_PI * X[:, 1])
        return np.column_stack([
            1 - rho * s2 - np.cos(TWO_PI * X[:, 2]),
            s2,
            0.5 * np.sin(2 * TWO_PI * X[:, 2]),
        ])

    def leaf(X):
        s3 = np.sin(TWO_PI * X[:, 2])
        out = np.zeros((len(X), 2, 3))
        out[:, 0, 0] = 1.0
        out[:, 0, 2] = -s3
        out[:, 1, 1] = 1.0
        out[:, 1, 2] = -rho * s3
        return out

    def omega0(X):
        s3 = np.sin(TWO_PI * X[:, 2])
        c3 = np.cos(TWO_PI * X[:, 2])
        coeffs = np.column_stack([s3, rho * s3, np.ones(len(X))])
        jac0 = np.zeros((len(X), 3, 3))
        jac0[:, 0, 2] = TWO_PI * c3
        jac0[:, 1, 2] = TWO_PI * rho * c3
        return coeffs, jac0

    orbits = [
        _axis_orbit(name, [0.0, a, b], 0)
        for name, a, b in [("gamma1", 0.0, 0.25), ("gamma2", 0.0, 0.75), ("gamma3", 0.5, 0.25), ("gamma4", 0.5, 0.75)]
    ]
    return FDS3Model(
        name="t3_type3",
        family="t3_type3",
        params={"rho": rho},
        type_label="III-3",
        omega=omega,
        omega_jacobian=jac,
        flows=[("phi1", _const([1.0, 0.0, 0.0])), ("phi2", flow2)],
        leaf_tangents=leaf,
        sampler=_away_from_leaves,
        closed_orbits=orbits,
        loops=[
            _circle_loop("gamma^1 (theta1 circle)", [0.0, 0.0, 0.25], 0, 1.0),
            _circle_loop("gamma^2 (theta2 circle)", [0.0, 0.0, 0.25], 1, rho),
        ],
        infinite_leaves=["theta3 = 0", "theta3 = 1/2"],
        orbit_flow=1,
        domain_check=_singular_check(),
        integrability_form=omega0,
    )


MODEL_NAMES = ("product", "rotation", "t3_linear", "t3_type2", "t3_type3")


def make_model(name: str, k: int = 3, rho: float = math.sqrt(2), rho_m: float = math.sqrt(2),
               rho_l: float = math.sqrt(3)) -> FDS3Model:
    if name == "product":
        return make_product_model()
    if name == "rotation":
        return make_rotation_model(k)
    if name == "t3_linear":
        return make_t3_linear_model(rho_m, rho_l)
    if name == "t3_type2":
        return make_t3_type2_model()
    if name == "t3_type3":
        return make_t3_type3_model(rho)
    raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")


# -- checks ---------------------------------------------------------------

@dataclass
class CanonicalFormReport:
    model: str
    samples: int
    leaf_residual: float
    flow_residuals: dict
    d_omega_residual: float
    integrability_residual: float | None = None
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        worst = max([self.leaf_residual, self.d_omega_residual, *self.flow_residuals.values()])
        ok = worst < self.tolerance
        if self.integrability_residual is not None:
            ok = ok and self.integrability_residual < 1e-10
        return ok

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "samples": self.samples,
            "leaf_residual": self.leaf_residual,
            "flow_residuals": self.flow_residuals,
            "d_omega_residual": self.d_omega_residual,
            "integrability_residual": self.integrability_residual,
            "passed": self.passed,
        }


def d_of_one_form(jac: np.ndarray) -> np.ndarray:
    """Coefficients of ``d omega`` on ``dx0^dx1, dx0^dx2, dx1^dx2``."""
    return np.column_stack([
        jac[:, 1, 0] - jac[:, 0, 1],
        jac[:, 2, 0] - jac[:, 0, 2],
        jac[:, 2, 1] - jac[:, 1, 2],
    ])


def canonical_form_check(
    model: FDS3Model,
    samples: int = 10_000,
    seed: int = 0,
    omega: Callable | None = None,
    omega_jacobian: Callable | None = None,
    tolerance: float = 1e-9,
) -> CanonicalFormReport:
    """Residuals of ``omega|leaf = 0``, ``omega(flow) = 1`` and ``d omega = 0``.

    ``omega``/``omega_jacobian`` override the stored form (for deliberate
    perturbations).
    """
    rng = np.random.default_rng(seed)
    X = model.sampler(rng, samples)
    if model.domain_check is not None:
        model.domain_check(X)
    w = (omega or model.omega)(X)
    jac = (omega_jacobian or model.omega_jacobian)(X)
    leaves = model.leaf_tangents(X)
    leaf_res = float(np.max(np.abs(np.einsum("nki,ni->nk", leaves, w))))
    flows = {name: float(np.max(np.abs(np.einsum("ni,ni->n", fl(X), w) - 1.0))) for name, fl in model.flows}
    d_res = float(np.max(np.abs(d_of_one_form(jac))))
    integ = None
    if model.integrability_form is not None:
        integ = integrability_residual(model, X)
    return CanonicalFormReport(model.name, samples, leaf_res, flows, d_res, integ, tolerance)


def integrability_residual(model: FDS3Model, X: np.ndarray) -> float:
    """``max |w0 ^ d w0|`` for the defining form of the foliation."""
    coeffs, jac = model.integrability_form(X)
    d = d_of_one_form(jac)  # on (01, 02, 12)
    # w ^ dw coefficient of dx0^dx1^dx2 = w0 d12 - w1 d02 + w2 d01
    vol = coeffs[:, 0] * d[:, 2] - coeffs[:, 1] * d[:, 1] + coeffs[:, 2] * d[:, 0]
    return float(np.max(np.abs(vol)))


@dataclass
class PeriodReport:
    lattice: Lattice
    values: dict
    max_error: float

    def to_dict(self) -> dict:
        return {"generators": list(self.lattice.generators), "values": self.values, "max_error": self.max_error}


def period_group(model: FDS3Model, order: int = 32, pieces: int = 8, tolerance: float = 1e-8) -> PeriodReport:
    """Integrate ``omega`` over each declared generator loop and round to the declared value."""
    x, wts = unit_interval_rule(order)
    values = {}
    worst = 0.0
    for lp in model.loops:
        total = 0.0
        for p in range(pieces):
            t = (p + x) / pieces
            X = lp.point(t)
            total += float(np.sum(wts * np.einsum("ni,ni->n", model.evaluate_omega(X), lp.tangent(t)))) / pieces
        err = abs(total - lp.declared)
        if err > tolerance:
            raise ValueError(f"loop {lp.name!r}: integral {total!r} does not round to {lp.declared!r}")
        values[lp.name] = total
        worst = max(worst, err)
    return PeriodReport(model.period_lattice, values, worst)


@dataclass
class TangencyReport:
    orbit: str
    tangency_residual: float
    transversality: float
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.tangency_residual < self.tolerance and self.transversality > 1e-6

    def to_dict(self) -> dict:
        return {
            "orbit": self.orbit,
            "tangency_residual": self.tangency_residual,
            "transversality": self.transversality,
            "passed": self.passed,
        }


def flow_tangency_check(model: FDS3Model, orbit: ClosedOrbit, samples: int = 200, seed: int = 0,
                        flow_index: int | None = None) -> TangencyReport:
    """Flow parallel to the orbit tangent and transverse to the leaf planes along the orbit."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 1.0, samples)
    X = orbit.point(t)
    flow = model.flows[model.orbit_flow if flow_index is None else flow_index][1](X)
    tan = orbit.tangent(t)
    tan_unit = tan / np.linalg.norm(tan, axis=1)[:, None]
    cross = np.linalg.norm(np.cross(flow, tan_unit), axis=1)
    leaves = model.leaf_tangents(X)
    det = np.abs(np.linalg.det(np.stack([flow, leaves[:, 0], leaves[:, 1]], axis=1)))
    return TangencyReport(orbit.name, float(np.max(cross)), float(np.min(det)))


def circle_orbit(name: str, fixed, axis: int) -> ClosedOrbit:
    """A coordinate circle presented as a candidate orbit (useful for negative checks)."""
    return _axis_orbit(name, fixed, axis)
