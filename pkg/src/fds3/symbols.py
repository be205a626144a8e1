"""Local symbols along closed orbits and the reciprocity sum.

The local symbol of ``f, g`` along a closed orbit is the integral of the
degree-3 class ``c(f) u c(g) u c(omega~)`` over the boundary torus of a
tubular neighbourhood, taken modulo ``Lambda(3)``.  Here
``omega~ = 2*pi*i*omega`` so that every cocycle condition closes exactly.

Two independent evaluations are provided: the flag sum over a triangulated
torus (:func:`local_symbol_flag`) and a closed formula in terms of continuous
lifts ``F, G, Phi`` of ``log f, log g`` and the primitive of ``omega~`` on
the unit square (:func:`local_symbol_direct`)::

    int F dG ^ dPhi + M_f int_0^1 G(u,0) Phi_u du - L_f int_0^1 G(0,v) Phi_v dv
        + (L_f M_g - M_f L_g) Phi(0,0)

where ``M`` and ``L`` are the meridian and longitude periods of a lift.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import forms as F
from .cech import (
    AffineFunction,
    DeligneClass,
    LiftedFunction,
    class_of_lifted,
    cup,
    curvature,
    deligne_cocycle_check,
)
from .cover import GoodCover, grid_cover
from .functions import INF, MeromorphicFunction, point_key, tame_symbol, weil_product
from .integration import integrate_deligne, integrate_simplex
from .lattice import Lattice, ReductionResult, complex_to_json, lattice_reduce
from .mesh import TorusMesh, alternate_index_map, default_index_map
from .models import FDS3Model
from .parallel import ordered_map
from .tubes import ContinuedLog, FlowPrimitive, Tube, TubeLog, continue_log, max_radius

TWO_PI_I = 2j * math.pi
CUBE = TWO_PI_I**3


@dataclass
class TorusCechData:
    """Everything needed to build the three degree-1 classes on one boundary torus."""

    cover: GoodCover
    log_f: LiftedFunction
    log_g: LiftedFunction
    phi: LiftedFunction
    lattice: Lattice
    radius: float
    source: str = "model"
    label: dict = field(default_factory=dict)

    def __post_init__(self):
        self._classes = None
        self._triple = None

    def classes(self) -> tuple[DeligneClass, DeligneClass, DeligneClass]:
        if self._classes is None:
            cf = class_of_lifted(self.log_f, self.cover, recipe={"kind": "function", "branch": self.log_f.to_dict()})
            cg = class_of_lifted(self.log_g, self.cover, recipe={"kind": "function", "branch": self.log_g.to_dict()})
            cw = class_of_lifted(self.phi, self.cover, recipe={"kind": "form", "primitive": self.phi.to_dict()})
            self._classes = (cf, cg, cw)
        return self._classes

    def triple(self) -> DeligneClass:
        if self._triple is None:
            cf, cg, cw = self.classes()
            self._triple = cup(cup(cf, cg), cw)
        return self._triple

    @property
    def windings(self) -> dict:
        """Longitude and meridian periods of the three lifts as complex numbers."""
        return {
            "L_f": self.log_f.periods[0].value, "M_f": self.log_f.periods[1].value,
            "L_g": self.log_g.periods[0].value, "M_g": self.log_g.periods[1].value,
            "L_phi": self.phi.periods[0].value, "M_phi": self.phi.periods[1].value,
        }

    def seam_table(self) -> dict:
        """Exact jumps ``m, n, lambda`` (integer coefficients) across the two seams."""
        cf, cg, cw = self.classes()
        rows = {}
        for name, c in (("m", cf), ("n", cg), ("lambda", cw)):
            rows[name] = {
                "meridian_seam": list(c.top(((3, 1), (1, 1))).coeffs),
                "longitude_seam": list(c.top(((1, 3), (1, 1))).coeffs),
                "interior": list(c.top(((1, 1), (2, 1))).coeffs),
            }
        return rows

    def check(self, sample_count: int = 5) -> dict:
        return {name: deligne_cocycle_check(c, sample_count).to_dict()
                for name, c in zip(("c(f)", "c(g)", "c(omega)"), self.classes())}


@dataclass
class SymbolResult:
    raw: complex
    reduction: ReductionResult
    method: str
    terms: dict = field(default_factory=dict)
    lattice: Lattice | None = None

    @property
    def reduced(self) -> complex:
        return self.reduction.reduced

    @property
    def coefficients(self) -> tuple:
        return self.reduction.coefficients

    @property
    def residual(self) -> float:
        return self.reduction.residual

    @property
    def verdict(self) -> str:
        return self.reduction.verdict

    def to_dict(self) -> dict:
        return {
            "raw": complex_to_json(self.raw),
            "reduced": complex_to_json(self.reduced),
            "coefficients": list(self.coefficients),
            "residual": self.residual,
            "verdict": self.verdict,
            "method": self.method,
            "terms": {k: complex_to_json(v) for k, v in self.terms.items()},
        }


def reduce_symbol(value: complex, lattice: Lattice, tolerance: float = 1e-8, bound: int = 10_000) -> ReductionResult:
    return lattice_reduce(value, lattice.with_twist(3), bound=bound, tolerance=tolerance)


# -- building boundary data ------------------------------------------------

def _continued_log_at(f: MeromorphicFunction, start: complex, end: complex, base_log: complex | None = None) -> complex:
    """``log f(end)`` continued from ``start`` along a horizontal then vertical path."""
    corner = complex(end.real, start.imag)
    value = cmath.log(complex(f(start))) if base_log is None else base_log
    for a, b in ((start, corner), (corner, end)):
        n = 256
        for _ in range(10):
            path = a + np.linspace(0.0, 1.0, n + 1) * (b - a)
            try:
                value = continue_log(f, path[None, :], value)[0, -1]
                break
            except ValueError:
                n *= 4
        else:
            raise ValueError("branch plan path passes through the divisor")
    return value


def _branch(f: MeromorphicFunction, tube: Tube, eps: float, method: str, log_base: complex | None):
    structural = TubeLog(f, tube)
    anchor = np.array([[0.0, 0.0, eps]])
    if log_base is not None:
        z_anchor = complex(tube.fiber_point(anchor)[0])
        target = _continued_log_at(f, complex(log_base), z_anchor)
        shift = int(round(((target - structural.value(anchor)[0]) / TWO_PI_I).real))
        structural = TubeLog(f, tube, shift)
    if method == "structural":
        return structural
    if method == "continued":
        return ContinuedLog(f, tube, base=anchor[0], base_log=structural.value(anchor)[0])
    raise ValueError(f"unknown branch method {method!r}")


def boundary_data(
    model: FDS3Model,
    f: MeromorphicFunction,
    g: MeromorphicFunction,
    orbit,
    eps: float = 0.1,
    branch: str = "structural",
    log_base: complex | None = None,
    s0: float = 0.0,
    radial: tuple[float, float] | None = None,
    margin: float = 0.05,
) -> TorusCechData:
    """Boundary torus data for the closed orbit through the fiber point ``orbit``.

    ``log_base`` fixes a global branch plan: every log branch is continued
    from that fiber point.  ``s0`` is the flow time of the global base point
    used for the primitive of ``omega~``.
    """
    if not model.fibred:
        raise ValueError(f"model {model.name} has no meromorphic function library")
    if model.monodromy_order > 1:
        for name, h in (("f", f), ("g", g)):
            if not h.is_rotation_invariant(model.monodromy_order):
                raise ValueError(f"{name} = {h} is not invariant under the monodromy of order {model.monodromy_order}")
    tube = model.orbit_tube(orbit, eps)
    limit = min(max_radius(f, tube), max_radius(g, tube))
    if not 0 < eps < 0.5 * limit:
        raise ValueError(
            f"tube radius {eps} is too large: tubes around nearby divisor points overlap (need < {0.5 * limit:.4g})"
        )
    if radial is None:
        radial = (0.5 * eps, min(2.0 * eps, 0.9 * limit))
    cover = grid_cover(3, margin, radial)
    log_f = _branch(f, tube, eps, branch, log_base)
    log_g = _branch(g, tube, eps, branch, log_base)
    phi = FlowPrimitive(tube, s0=s0)
    label = {"model": model.name, "orbit": INF if tube.at_infinity else complex_to_json(tube.center),
             "period": tube.period, "tau": str(tube.tau), "eps": eps, "f": str(f), "g": str(g)}
    return TorusCechData(cover, log_f, log_g, phi, model.period_lattice, eps, "model", label)


def synthetic_data(
    log_f: LiftedFunction,
    log_g: LiftedFunction,
    phi: LiftedFunction,
    lattice: Lattice = Lattice.integers(),
    radius: float = 0.1,
    cover: GoodCover | None = None,
    check: bool = True,
) -> TorusCechData:
    """User-supplied branches and primitive, accepted after a cocycle check."""
    cover = cover or grid_cover(3, 0.05, (0.5 * radius, 2.0 * radius))
    data = TorusCechData(cover, log_f, log_g, phi, lattice, radius, "synthetic")
    if check:
        for name, rep in data.check().items():
            if not rep["valid"]:
                raise ValueError(f"synthetic {name} fails the cocycle check: {rep['residuals']}")
    return data


def affine_synthetic_data(
    m: int, n: int, lam: int,
    log_f0: complex = 0.0, log_g0: complex = 0.0, phi0: complex = 0.0,
    l_f: int = 0, l_g: int = 0,
    radius: float = 0.1,
) -> TorusCechData:
    """Synthetic data with affine lifts: ``F = log_f0 + 2 pi i (l_f u + m v)`` etc."""
    Z = Lattice.integers()
    return synthetic_data(
        AffineFunction(Z, (l_f,), (m,), log_f0),
        AffineFunction(Z, (l_g,), (n,), log_g0),
        AffineFunction(Z, (lam,), (0,), phi0),
        Z,
        radius,
    )


# -- symbols -----------------------------------------------------------------

@lru_cache(maxsize=16)
def _mesh(r: int) -> TorusMesh:
    return TorusMesh(r)


def _index_map(mesh: TorusMesh, cover: GoodCover, rule: str):
    if rule == "default":
        return default_index_map(mesh, cover)
    if rule == "alternate":
        return alternate_index_map(mesh, cover)
    raise ValueError(f"unknown index map rule {rule!r}")


def local_symbol_flag(
    data: TorusCechData,
    r: int = 1,
    order: int = 16,
    index_map: str = "default",
    tolerance: float = 1e-8,
) -> SymbolResult:
    """Flag-sum integral of ``c(f) u c(g) u c(omega~)`` over the boundary torus."""
    mesh = _mesh(r)
    imap = _index_map(mesh, data.cover, index_map)
    res = integrate_deligne(data.triple(), mesh, imap, data.radius, order)
    return SymbolResult(res.value, reduce_symbol(res.value, data.lattice, tolerance), "flag", res.terms, data.lattice)


def local_symbol_direct(
    data: TorusCechData,
    order: int = 16,
    r: int = 1,
    paper_literal: bool = False,
    tolerance: float = 1e-8,
) -> SymbolResult:
    """Closed formula on the unit square using continuous lifts (see module docstring)."""
    Fm = F.Function0(data.log_f.value, data.log_f.grad, "F")
    Gm = F.Function0(data.log_g.value, data.log_g.grad, "G")
    Pm = F.Function0(data.phi.value, data.phi.grad, "Phi")
    mesh = _mesh(r)
    eps = data.radius
    surface_form = F.wedge(Fm, F.wedge(Gm.d(), Pm.d()))
    surface = sum(integrate_simplex(surface_form, t, eps, order) for t in mesh.triangles)
    line_form = F.wedge(Gm, Pm.d())
    longitude = sum(integrate_simplex(line_form, e, eps, order) for e in mesh.longitude_cycle(0))
    meridian = sum(integrate_simplex(line_form, e, eps, order) for e in mesh.meridian_cycle(0))
    w = data.windings
    corner = (w["L_f"] * w["M_g"] - w["M_f"] * w["L_g"]) * data.phi.value(np.array([[0.0, 0.0, eps]]))[0]
    terms = {
        "surface": surface,
        "meridian x longitude": w["M_f"] * longitude,
        "longitude x meridian": -w["L_f"] * meridian,
        "corner": corner,
    }
    if paper_literal:
        terms["surface"] /= TWO_PI_I
        terms["meridian x longitude"] /= TWO_PI_I
    raw = complex(sum(terms.values()))
    return SymbolResult(raw, reduce_symbol(raw, data.lattice, tolerance), "direct-literal" if paper_literal else "direct",
                        terms, data.lattice)


def compare_mod_lattice(a: complex, b: complex, lattice: Lattice, tolerance: float) -> ReductionResult:
    return reduce_symbol(complex(a) - complex(b), lattice, tolerance)


def triple_curvature_residual(data: TorusCechData, samples: int = 1000) -> float:
    """Max |coefficient| of the curvature 3-form of the triple product at sample points."""
    omega = curvature(data.triple())
    cover = data.cover
    per = max(1, samples // len(cover.chart_ids))
    worst = 0.0
    for cid in cover.chart_ids:
        pts = cover.sample_points((cid,), per - 1)
        worst = max(worst, float(np.max(np.abs(omega.chart_forms[cid].evaluate(pts)))))
    return worst


# -- reciprocity ---------------------------------------------------------------

def orbit_representatives(model: FDS3Model, f: MeromorphicFunction, g: MeromorphicFunction) -> list:
    """One fiber point per closed orbit in the support of div f + div g, in a fixed order."""
    pts = {}
    for p in f.support + g.support:
        pts[point_key(p)] = p
    k = model.monodromy_order
    reps = {}
    for key in sorted(pts):
        p = pts[key]
        if isinstance(p, str) or k == 1 or abs(complex(p)) < 1e-14:
            reps[key] = p
            continue
        zeta = cmath.exp(2j * math.pi / k)
        orbit = [complex(p) * zeta**j for j in range(k)]
        rep = min(orbit, key=point_key)
        # use the stored divisor point closest to the canonical representative
        rep = min((pts[q] for q in pts if not isinstance(pts[q], str)), key=lambda q: abs(complex(q) - rep))
        reps[point_key(rep)] = rep
    return [reps[key] for key in sorted(reps)]


@dataclass
class ReciprocityResult:
    total: SymbolResult
    table: list

    @property
    def verdict(self) -> str:
        return self.total.verdict

    def to_dict(self) -> dict:
        out = self.total.to_dict()
        out["orbits"] = self.table
        return out


def reciprocity_sum(
    model: FDS3Model,
    f: MeromorphicFunction,
    g: MeromorphicFunction,
    eps: float = 0.1,
    r: int = 1,
    order: int = 16,
    method: str = "flag",
    log_base: complex | None = None,
    s0: float = 0.0,
    tolerance: float = 1e-6,
    index_map: str = "default",
) -> ReciprocityResult:
    """Sum of local symbols over every closed orbit meeting the divisors, reduced mod ``Lambda(3)``."""
    if model.infinite_leaves:
        raise ValueError("models with compact non-transverse leaves need synthetic leaf data")
    orbits = orbit_representatives(model, f, g)

    def one(p):
        data = boundary_data(model, f, g, p, eps, log_base=log_base, s0=s0)
        if method == "flag":
            res = local_symbol_flag(data, r, order, index_map)
        elif method == "direct":
            res = local_symbol_direct(data, order)
        else:
            raise ValueError(f"unknown method {method!r}")
        return data, res

    results = ordered_map(one, orbits)
    table = []
    total = 0.0j
    for p, (data, res) in zip(orbits, results):
        total += res.raw
        table.append({
            "orbit": "inf" if isinstance(p, str) else complex_to_json(p),
            "period": data.label["period"],
            "ord_f": f.order(p),
            "ord_g": g.order(p),
            "raw": complex_to_json(res.raw),
            "reduced": complex_to_json(res.reduced),
        })
    summary = SymbolResult(total, reduce_symbol(total, model.period_lattice, tolerance), f"reciprocity-{method}",
                           lattice=model.period_lattice)
    return ReciprocityResult(summary, table)


def tame_symbol_oracle(f: MeromorphicFunction, g: MeromorphicFunction, p) -> dict:
    """Classical tame symbol at ``p`` and its principal logarithm."""
    value = tame_symbol(f, g, p)
    return {"value": value, "log": cmath.log(value)}


def product_symbol_prediction(f: MeromorphicFunction, g: MeromorphicFunction, p, period: int = 1) -> complex:
    """Value the local symbol must take modulo ``(2 pi i)^3 Z`` for an untwisted orbit.

    It is ``-period * (2 pi i)^2 * log T_p(f, g)``.
    """
    return -period * TWO_PI_I**2 * cmath.log(tame_symbol(f, g, p))


def weil_reciprocity(f: MeromorphicFunction, g: MeromorphicFunction) -> complex:
    return weil_product(f, g)


def leaf_symbol(components: Sequence[tuple[TorusCechData, int]], r: int = 1, order: int = 16,
                tolerance: float = 1e-8) -> SymbolResult:
    """Symbol along a compact two-sided leaf: sum over both boundary components with orientation signs."""
    if len(components) != 2:
        raise ValueError("a two-sided leaf has exactly two boundary components")
    total = 0.0j
    terms = {}
    lattice = components[0][0].lattice
    for n, (data, sign) in enumerate(components):
        if sign not in (1, -1):
            raise ValueError("orientation signs must be +1 or -1")
        res = local_symbol_flag(data, r, order)
        terms[f"component {n}"] = sign * res.raw
        total += sign * res.raw
    return SymbolResult(total, reduce_symbol(total, lattice, tolerance), "leaf", terms, lattice)
