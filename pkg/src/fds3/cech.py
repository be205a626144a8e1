"""Čech–Deligne cocycles over a finite good cover.

A degree-n class is ``(lambda, theta^0, ..., theta^{n-1})`` where ``lambda``
assigns an exact element of ``Lambda(n)`` to each (n+1)-tuple of charts and
``theta^i`` assigns an i-form to each (n-i)-tuple.  Components are produced
lazily by callables and cached per tuple.

The total differential is ``D = delta + (-1)^p d`` on Čech degree ``p``, so
the cocycle conditions read::

    delta theta^0 + (-1)^n lambda = 0
    delta theta^i + (-1)^(n-i) d theta^(i-1) = 0      (1 <= i <= n-1)

Multivalued degree-0 data enters through *lifted functions*: single-valued
functions ``F`` on the universal cover of the torus with exact periods
``F(X + e_u) - F(X) = P_u`` and ``F(X + e_v) - F(X) = P_v``.  Evaluating ``F``
at a chart's lift of a point gives that chart's branch; branch jumps on an
overlap are then integer combinations of the periods, hence exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from . import forms as F
from .cover import GoodCover
from .lattice import Lattice, LatticeElement, product_lattice, round_to_lattice, TWO_PI_I
from .quadrature import gauss_legendre


class LiftedFunction(Protocol):
    lattice: Lattice
    periods: tuple[LatticeElement, LatticeElement]

    def value(self, X: np.ndarray) -> np.ndarray: ...

    def grad(self, X: np.ndarray) -> np.ndarray: ...

    def to_dict(self) -> dict: ...


def lifted_form(fn: LiftedFunction, name: str = "F") -> F.Function0:
    return F.Function0(fn.value, fn.grad, name=name)


class Cochain:
    """A tuple-indexed family of forms of fixed degree and arity, cached."""

    def __init__(self, cover: GoodCover, arity: int, degree: int, builder: Callable[[tuple], F.Form]):
        self.cover = cover
        self.arity = arity
        self.degree = degree
        self._builder = builder
        self._cache: dict[tuple, F.Form] = {}

    def __call__(self, t: Sequence) -> F.Form:
        t = tuple(t)
        if len(t) != self.arity:
            raise ValueError(f"expected a {self.arity}-tuple of charts, got {t!r}")
        form = self._cache.get(t)
        if form is None:
            for c in t:
                self.cover.check_chart(c)
            if not self.cover.is_nonempty(t):
                raise ValueError(f"tuple {t!r} references an empty intersection")
            form = self._builder(t)
            if form.degree != self.degree:
                raise RuntimeError(f"component on {t!r} has degree {form.degree}, expected {self.degree}")
            self._cache[t] = form
        return form

    def d(self) -> "Cochain":
        return Cochain(self.cover, self.arity, self.degree + 1, lambda t: self(t).d())


class LatticeCochain:
    def __init__(self, cover: GoodCover, arity: int, lattice: Lattice, builder: Callable[[tuple], object]):
        self.cover = cover
        self.arity = arity
        self.lattice = lattice
        self._builder = builder
        self._cache: dict[tuple, object] = {}

    def __call__(self, t: Sequence):
        t = tuple(t)
        if len(t) != self.arity:
            raise ValueError(f"expected a {self.arity}-tuple of charts, got {t!r}")
        val = self._cache.get(t)
        if val is None:
            for c in t:
                self.cover.check_chart(c)
            if not self.cover.is_nonempty(t):
                raise ValueError(f"tuple {t!r} references an empty intersection")
            val = self._builder(t)
            self._cache[t] = val
        return val


def _as_value(x) -> complex:
    return x.value if isinstance(x, LatticeElement) else complex(x)


def cech_delta(component: Cochain) -> Cochain:
    """Alternating-sum coboundary ``(delta theta)_{a0..ak} = sum_j (-1)^j theta_{..^aj..}``."""

    def build(t):
        terms = [F.scale((-1) ** j, component(t[:j] + t[j + 1:])) for j in range(len(t))]
        return F.add(*terms)

    return Cochain(component.cover, component.arity + 1, component.degree, build)


def cech_delta_lattice(component: LatticeCochain) -> LatticeCochain:
    def build(t):
        total = component.lattice.zero()
        for j in range(len(t)):
            e = component(t[:j] + t[j + 1:])
            total = total + e if j % 2 == 0 else total - e
        return total

    return LatticeCochain(component.cover, component.arity + 1, component.lattice, build)


@dataclass
class DeligneClass:
    degree: int
    lattice: Lattice
    cover: GoodCover
    top: LatticeCochain
    forms: list
    recipe: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise ValueError("degree must be 1, 2 or 3")
        if self.lattice.twist != self.degree:
            raise ValueError("lattice twist must equal the class degree")
        if len(self.forms) != self.degree:
            raise ValueError("need one form component per degree below n")
        for i, comp in enumerate(self.forms):
            if comp.degree != i or comp.arity != self.degree - i:
                raise ValueError(f"component theta^{i} has wrong degree or arity")

    def lam(self, t: Sequence):
        return self.top(t)

    def theta(self, i: int, t: Sequence) -> F.Form:
        return self.forms[i](t)

    def to_dict(self, include_lambda: bool = True) -> dict:
        out = {
            "degree": self.degree,
            "lattice": self.lattice.to_dict(),
            "cover": self.cover.to_dict(),
            "recipe": self.recipe,
        }
        if include_lambda:
            table = []
            for t in self.cover.nonempty_tuples(self.degree + 1):
                val = self.top(t)
                if isinstance(val, LatticeElement) and val.is_zero:
                    continue
                table.append({"charts": [list(c) for c in t], "coeffs": list(val.coeffs)})
            out["lambda"] = table
        return out


def zero_class(degree: int, lattice: Lattice, cover: GoodCover) -> DeligneClass:
    lat = lattice.with_twist(degree)
    top = LatticeCochain(cover, degree + 1, lat, lambda t: lat.zero())
    forms = [Cochain(cover, degree - i, i, (lambda i: lambda t: F.Zero(i))(i)) for i in range(degree)]
    return DeligneClass(degree, lat, cover, top, forms, {"kind": "zero", "degree": degree, "lattice": lattice.to_dict()})


def class_of_lifted(
    fn: LiftedFunction,
    cover: GoodCover,
    offsets: dict | None = None,
    recipe: dict | None = None,
    name: str = "F",
) -> DeligneClass:
    """Degree-1 class with ``theta^0_a = F(lift_a + k_a)`` and exact jumps as ``lambda``."""
    offsets = offsets or {}
    form = lifted_form(fn, name)
    lat = fn.lattice.with_twist(1)
    P_u, P_v = fn.periods
    if P_u.lattice != lat or P_v.lattice != lat:
        raise ValueError("periods must lie in the twisted lattice Lambda(1)")

    def off(a) -> np.ndarray:
        k = offsets.get(a, (0, 0))
        return np.array([k[0], k[1], 0.0])

    def theta0(t):
        a = t[0]
        shift = off(a)
        return F.Shifted(form, lambda X, a=a, shift=shift: cover.lift(a, X) + shift, label=a)

    def lam(t):
        a, b = t
        p = cover.sample_points(t, 0)
        k = cover.lift_offset(b, p)[0] - cover.lift_offset(a, p)[0] + (off(b) - off(a))[:2].astype(int)
        return P_u.scale(int(k[0])) + P_v.scale(int(k[1]))

    top = LatticeCochain(cover, 2, lat, lam)
    forms = [Cochain(cover, 1, 0, theta0)]
    return DeligneClass(1, lat, cover, top, forms, recipe or {"kind": "lifted", "function": fn.to_dict()})


class AffineFunction:
    """``F(u, v, r) = c0 + a_u u + a_v v`` with exact periods ``(a_u, a_v)``."""

    def __init__(self, lattice: Lattice, period_u: Sequence[int], period_v: Sequence[int], const: complex = 0.0):
        self.lattice = lattice
        lat = lattice.with_twist(1)
        self.periods = (lat.element(period_u), lat.element(period_v))
        self.const = complex(const)
        self._a = np.array([self.periods[0].value, self.periods[1].value, 0.0], dtype=complex)

    def value(self, X):
        X = np.asarray(X, dtype=float)
        return self.const + X @ self._a

    def grad(self, X):
        return np.broadcast_to(self._a, (len(X), 3)).copy()

    def to_dict(self) -> dict:
        return {
            "type": "affine",
            "lattice": self.lattice.to_dict(),
            "period_u": list(self.periods[0].coeffs),
            "period_v": list(self.periods[1].coeffs),
            "const": [self.const.real, self.const.imag],
        }


class PathPrimitive:
    """``2*pi*i`` times the integral of a closed 1-form along an axis-parallel path.

    The path runs from ``base`` first along ``u``, then ``v``, then ``r``.
    Periods are computed by quadrature over the unit loops through the base
    point and rounded to exact elements of ``lattice(1)``.
    """

    def __init__(
        self,
        omega: F.Form,
        lattice: Lattice,
        base: Sequence[float] = (0.0, 0.0, 0.1),
        order: int = 16,
        pieces: int = 8,
        tolerance: float = 1e-8,
        name: str = "omega",
    ):
        if omega.degree != 1:
            raise ValueError("PathPrimitive needs a 1-form")
        self.omega = omega
        self.lattice = lattice
        self.base = np.asarray(base, dtype=float)
        self.order = order
        self.pieces = pieces
        self.name = name
        self._nodes, self._weights = gauss_legendre(order)
        lat = lattice.with_twist(1)
        raw = []
        for axis in (0, 1):
            end = self.base.copy()
            end[axis] += 1.0
            raw.append(complex(self._segment(self.base[None, :], end[None, :], axis)[0]))
        self.raw_periods = tuple(raw)
        self.periods = (
            round_to_lattice(raw[0], lat, tolerance),
            round_to_lattice(raw[1], lat, tolerance),
        )

    def _segment(self, start: np.ndarray, end: np.ndarray, axis: int) -> np.ndarray:
        # 2*pi*i * int_start^end omega_axis, start/end differ only along axis
        L = end[:, axis] - start[:, axis]
        total = np.zeros(len(start), dtype=complex)
        nodes = (self._nodes + 1) / 2
        weights = self._weights / 2
        for p in range(self.pieces):
            t = (p + nodes) / self.pieces
            pts = np.repeat(start[:, None, :], len(t), axis=1)
            pts[:, :, axis] = start[:, None, axis] + t[None, :] * L[:, None]
            vals = self.omega.evaluate(pts.reshape(-1, 3))[:, axis].reshape(len(start), len(t))
            total += vals @ weights * (L / self.pieces)
        return TWO_PI_I * total

    def value(self, X):
        X = np.asarray(X, dtype=float)
        p0 = np.repeat(self.base[None, :], len(X), axis=0)
        p1 = p0.copy()
        p1[:, 0] = X[:, 0]
        p2 = p1.copy()
        p2[:, 1] = X[:, 1]
        p3 = p2.copy()
        p3[:, 2] = X[:, 2]
        return self._segment(p0, p1, 0) + self._segment(p1, p2, 1) + self._segment(p2, p3, 2)

    def grad(self, X):
        return TWO_PI_I * self.omega.evaluate(X)

    def to_dict(self) -> dict:
        return {
            "type": "path_primitive",
            "omega": self.name,
            "lattice": self.lattice.to_dict(),
            "base": self.base.tolist(),
            "order": self.order,
            "period_u": list(self.periods[0].coeffs),
            "period_v": list(self.periods[1].coeffs),
        }


def class_of_function(branch: LiftedFunction, cover: GoodCover, offsets: dict | None = None) -> DeligneClass:
    """``c(f)``: ``theta^0`` are log branches, ``lambda`` the exact ``2*pi*i`` jumps.

    ``branch`` is a continuous lift of ``log f`` on the universal cover of the
    torus (see :mod:`fds3.tubes`).  Its lattice must be the integers.
    """
    if not branch.lattice.is_integers:
        raise ValueError("log branches have jumps in 2*pi*i Z")
    return class_of_lifted(branch, cover, offsets, {"kind": "function", "branch": branch.to_dict()}, name="log f")


def class_of_form(
    omega: F.Form,
    cover: GoodCover,
    lattice: Lattice,
    basepoint: Sequence[float] = (0.0, 0.0, 0.1),
    offsets: dict | None = None,
    order: int = 16,
    closed_tol: float = 1e-10,
    primitive: LiftedFunction | None = None,
) -> DeligneClass:
    """``c(omega)`` with ``theta^0_a = 2*pi*i * int omega`` from ``basepoint``.

    ``offsets`` choose which sheet each chart anchor is reached on; changing
    them changes ``lambda`` by a Čech coboundary of lattice constants.
    A closed-form ``primitive`` may be supplied in place of path quadrature.
    """
    check_closed(omega, cover, closed_tol)
    if primitive is None:
        primitive = PathPrimitive(omega, lattice, basepoint, order=order)
    elif primitive.lattice != lattice:
        raise ValueError("primitive lattice does not match")
    return class_of_lifted(primitive, cover, offsets, {"kind": "form", "primitive": primitive.to_dict()}, name="F_omega")


def check_closed(omega: F.Form, cover: GoodCover, tol: float) -> float:
    d = omega.d()
    if d.is_zero:
        return 0.0
    worst = 0.0
    for (c,) in cover.nonempty_tuples(1):
        pts = cover.sample_points((c,))
        worst = max(worst, float(np.max(np.abs(d.evaluate(pts)))))
    if worst > tol:
        raise ValueError(f"form is not closed: |d omega| = {worst:.3e}")
    return worst


def cup(x: DeligneClass, y: DeligneClass) -> DeligneClass:
    """Beilinson-type product: ``x*y`` on lattice parts, ``x ^ dy`` on forms.

    For a tuple ``t`` and total degree ``N = n + n'`` the K-degree ``Q``
    component is::

        Q = 0:         lambda_x(t[:n+1]) * lambda_y(t[n:])
        1 <= Q <= n':  lambda_x(t[:n+1]) * theta_y^{Q-1}(t[n:])
        Q > n':        theta_x^{Q-n'-1}(t) ^ d theta_y^{n'-1}(t[-1])
    """
    if x.cover is not y.cover:
        raise ValueError("classes live on different covers")
    n, m = x.degree, y.degree
    N = n + m
    if N > 3:
        raise ValueError("cup products beyond degree 3 are not supported")
    lat = product_lattice(x.lattice, y.lattice)
    cover = x.cover

    def top(t):
        return x.top(t[: n + 1]) * y.top(t[n:])

    def make_form(Q):
        if Q <= m:
            def build(t):
                lx = x.top(t[: n + 1])
                return F.scale(_as_value(lx), y.forms[Q - 1](t[n:]))
        else:
            def build(t):
                return F.wedge(x.forms[Q - m - 1](t), y.forms[m - 1]((t[-1],)).d())
        return build

    forms = [Cochain(cover, N - i, i, make_form(i + 1)) for i in range(N)]
    return DeligneClass(N, lat, cover, LatticeCochain(cover, N + 1, lat, top), forms,
                        {"kind": "cup", "left": x.recipe, "right": y.recipe})


@dataclass
class CocycleReport:
    degree: int
    residuals: dict
    lattice_ok: bool
    tuples_checked: int
    tolerance: float = 1e-9

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def valid(self) -> bool:
        return self.lattice_ok and self.max_residual < self.tolerance

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "residuals": self.residuals,
            "lattice_ok": self.lattice_ok,
            "tuples_checked": self.tuples_checked,
            "valid": self.valid,
        }


def deligne_cocycle_check(c: DeligneClass, sample_count: int = 5, tolerance: float = 1e-9) -> CocycleReport:
    """Max residual of every cocycle condition over all non-empty ordered tuples."""
    cover = c.cover
    n = c.degree
    residuals: dict[str, float] = {}
    lattice_ok = True
    checked = 0

    # lambda must be exact elements of Lambda(n)
    for t in cover.nonempty_tuples(n + 1):
        val = c.top(t)
        if not isinstance(val, LatticeElement) or val.lattice != c.lattice:
            lattice_ok = False

    # delta theta^0 + (-1)^n lambda = 0
    d0 = cech_delta(c.forms[0])
    worst = 0.0
    for t in cover.nonempty_tuples(n + 1):
        pts = cover.sample_points(t, sample_count)
        val = d0(t).evaluate(pts)[:, 0] + (-1) ** n * _as_value(c.top(t))
        worst = max(worst, float(np.max(np.abs(val))))
        checked += 1
    residuals["delta theta0 + (-1)^n lambda"] = worst

    for i in range(1, n):
        di = cech_delta(c.forms[i])
        dprev = c.forms[i - 1].d()
        sign = (-1) ** (n - i)
        worst = 0.0
        for t in cover.nonempty_tuples(n - i + 1):
            lhs = di(t)
            rhs = dprev(t)
            if lhs.is_zero and rhs.is_zero:
                checked += 1
                continue
            pts = cover.sample_points(t, sample_count)
            val = lhs.evaluate(pts) + sign * rhs.evaluate(pts)
            worst = max(worst, float(np.max(np.abs(val))))
            checked += 1
        residuals[f"delta theta{i} + (-1)^{n - i} d theta{i - 1}"] = worst

    if lattice_ok:
        dl = cech_delta_lattice(c.top)
        bad = 0
        for t in cover.nonempty_tuples(n + 2):
            if not dl(t).is_zero:
                bad += 1
        residuals["delta lambda (exact)"] = float(bad)
    return CocycleReport(n, residuals, lattice_ok, checked, tolerance)


class ChartwiseForm:
    """A global form given chart by chart, such as the curvature of a class."""

    def __init__(self, cover: GoodCover, degree: int, chart_forms: dict):
        self.cover = cover
        self.degree = degree
        self.chart_forms = chart_forms

    def evaluate(self, pts) -> np.ndarray:
        pts = F.as_points(pts)
        out = np.zeros((len(pts), F.ncomp(self.degree)), dtype=complex)
        done = np.zeros(len(pts), dtype=bool)
        for cid in self.cover.chart_ids:
            mask = (~done) & self.cover.contains(cid, pts)
            if mask.any():
                out[mask] = self.chart_forms[cid].evaluate(pts[mask])
                done |= mask
        if not done.all():
            raise ValueError("some points are not covered by any chart")
        return out

    def well_definedness(self, sample_count: int = 5) -> float:
        worst = 0.0
        for t in self.cover.nonempty_tuples(2):
            a, b = t
            if a == b:
                continue
            pts = self.cover.sample_points(t, sample_count)
            diff = self.chart_forms[a].evaluate(pts) - self.chart_forms[b].evaluate(pts)
            worst = max(worst, float(np.max(np.abs(diff))))
        return worst


def curvature(c: DeligneClass, check: bool = False) -> ChartwiseForm:
    """``Omega(c)|_{U_a} = d theta^{n-1}_a``."""
    if check:
        rep = deligne_cocycle_check(c)
        if not rep.valid:
            raise ValueError(f"class is not a cocycle (max residual {rep.max_residual:.3e})")
    comp = c.forms[c.degree - 1]
    return ChartwiseForm(c.cover, c.degree, {cid: comp((cid,)).d() for cid in c.cover.chart_ids})


def perturbed_class(c: DeligneClass, t: tuple, amount: complex) -> DeligneClass:
    """Copy of ``c`` whose ``lambda`` on tuple ``t`` is shifted by a raw complex number."""
    t = tuple(t)

    def top(s):
        val = c.top(s)
        return val.value + amount if s == t else val

    return DeligneClass(c.degree, c.lattice, c.cover, LatticeCochain(c.cover, c.degree + 1, c.lattice, top),
                        c.forms, {"kind": "perturbed", "base": c.recipe})


def lifted_from_dict(data: dict) -> LiftedFunction:
    kind = data["type"]
    if kind == "affine":
        return AffineFunction(Lattice.from_dict(data["lattice"]), data["period_u"], data["period_v"], complex(*data["const"]))
    from . import tubes

    return tubes.lifted_from_dict(data)


def class_from_dict(data: dict, cover: GoodCover | None = None) -> DeligneClass:
    """Rebuild a class from its recipe (closures are never serialized)."""
    cover = cover or GoodCover.from_dict(data["cover"])
    return _from_recipe(data["recipe"], cover)


def _from_recipe(recipe: dict, cover: GoodCover) -> DeligneClass:
    kind = recipe["kind"]
    if kind == "zero":
        return zero_class(recipe["degree"], Lattice.from_dict(recipe["lattice"]), cover)
    if kind == "function":
        return class_of_function(lifted_from_dict(recipe["branch"]), cover)
    if kind == "lifted":
        return class_of_lifted(lifted_from_dict(recipe["function"]), cover)
    if kind == "form":
        return class_of_lifted(lifted_from_dict(recipe["primitive"]), cover, recipe=recipe)
    if kind == "cup":
        return cup(_from_recipe(recipe["left"], cover), _from_recipe(recipe["right"], cover))
    raise ValueError(f"cannot rebuild class of kind {kind!r}")


