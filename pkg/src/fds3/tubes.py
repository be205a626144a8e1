"""Boundary tori of tubular neighbourhoods of closed orbits in fibred models.

A tube around the orbit through the fiber point ``z0`` uses coordinates
``(u, v, r)``: ``u`` runs once along the orbit, ``v`` once around the
meridian (counterclockwise in the local holomorphic coordinate) and ``r`` is
the radius.  The fiber point is::

    z = z0 + r * exp(2*pi*i*(v - tau*u))       (finite z0)
    1/z = r * exp(2*pi*i*(v - tau*u))          (z0 at infinity)

and the flow time is ``s = period * u``.  The twist ``tau`` makes the point
well defined when the monodromy rotates the fiber around the orbit.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .functions import INF, MeromorphicFunction
from .lattice import Lattice, round_to_lattice

TWO_PI_I = 2j * math.pi
Z1 = Lattice.integers(1)


@dataclass(frozen=True)
class Tube:
    center: object  # complex or INF
    period: int = 1
    tau: Fraction = Fraction(0)

    @property
    def at_infinity(self) -> bool:
        return isinstance(self.center, str) and self.center == INF

    def local(self, X) -> np.ndarray:
        """Local coordinate ``w`` (``z - z0`` or ``1/z``)."""
        X = np.asarray(X, dtype=float)
        phase = 2 * math.pi * (X[:, 1] - float(self.tau) * X[:, 0])
        return X[:, 2] * np.exp(1j * phase)

    def fiber_point(self, X) -> np.ndarray:
        w = self.local(X)
        return 1.0 / w if self.at_infinity else complex(self.center) + w

    def local_derivatives(self, X) -> np.ndarray:
        """``dw/du, dw/dv, dw/dr`` as an ``(N, 3)`` array."""
        X = np.asarray(X, dtype=float)
        w = self.local(X)
        return np.column_stack([-TWO_PI_I * float(self.tau) * w, TWO_PI_I * w, w / X[:, 2]])

    def to_dict(self) -> dict:
        c = self.center
        return {
            "center": INF if self.at_infinity else {"re": complex(c).real, "im": complex(c).imag},
            "period": self.period,
            "tau": str(self.tau),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Tube":
        c = data["center"]
        return cls(INF if c == INF else complex(c["re"], c["im"]), int(data["period"]), Fraction(data["tau"]))


def max_radius(f: MeromorphicFunction, tube: Tube) -> float:
    """Largest radius for which the tube avoids the rest of the divisor of ``f``."""
    if tube.at_infinity:
        mags = [abs(a) for a, _ in f.finite_divisor if abs(a) > 0]
        return 1.0 / max(mags) if mags else math.inf
    return f.min_distance(tube.center)


class TubeLog:
    """Continuous ``log f`` on the universal cover of a tube boundary.

    Near the orbit each factor ``(z - a)^m`` contributes ``m`` times an
    explicit logarithm: the winding factor uses ``log r + 2*pi*i*(v - tau*u)``
    and the others a principal logarithm plus ``log1p`` of a small quantity,
    which never crosses a branch cut while ``r`` stays below the distance to
    the rest of the divisor.
    """

    lattice = Lattice.integers()

    def __init__(self, f: MeromorphicFunction, tube: Tube, shift: int = 0):
        self.f = f
        self.tube = tube
        self.shift = int(shift)
        self.ord = f.order(tube.center)
        self.rmax = max_radius(f, tube)
        pv = self.ord if not tube.at_infinity else self.ord
        pu = -tube.tau * pv
        if pu.denominator != 1:
            raise ValueError(
                f"log f is not single valued along the longitude (twist {tube.tau}, order {pv}); "
                "is f invariant under the monodromy?"
            )
        self.periods = (Z1.element((int(pu),)), Z1.element((int(pv),)))
        c = f.scale
        self._const = cmath.log(c) + TWO_PI_I * self.shift
        if tube.at_infinity:
            self._terms = [(complex(a), m) for a, m in f.finite_divisor]
        else:
            z0 = complex(tube.center)
            self._terms = []
            for a, m in f.finite_divisor:
                if abs(a - z0) < 1e-12:
                    continue
                self._terms.append((a, m, cmath.log(z0 - a)))
                self._const += m * cmath.log(z0 - a)

    def _check_radius(self, X):
        r = np.asarray(X, dtype=float)[:, 2]
        if np.any(r <= 0) or np.any(r >= self.rmax):
            raise ValueError(f"radius outside (0, {self.rmax}) where the tube avoids the divisor")

    def value(self, X):
        X = np.asarray(X, dtype=float)
        self._check_radius(X)
        w = self.tube.local(X)
        logw = np.log(X[:, 2]) + TWO_PI_I * (X[:, 1] - float(self.tube.tau) * X[:, 0])
        out = np.full(len(X), self._const, dtype=complex)
        if self.tube.at_infinity:
            for a, m in self._terms:
                out += m * (np.log1p(-a * w) - logw)
        else:
            z0 = complex(self.tube.center)
            out += self.ord * logw
            for a, m, _ in self._terms:
                out += m * np.log1p(w / (z0 - a))
        return out

    def dlog_dw(self, X):
        w = self.tube.local(X)
        if self.tube.at_infinity:
            out = np.zeros(len(w), dtype=complex)
            for a, m in self._terms:
                out += m * (-a / (1 - a * w) - 1 / w)
            return out
        return self.f.log_derivative(complex(self.tube.center) + w)

    def grad(self, X):
        X = np.asarray(X, dtype=float)
        return self.dlog_dw(X)[:, None] * self.tube.local_derivatives(X)

    def to_dict(self) -> dict:
        return {"type": "tube_log", "f": self.f.to_dict(), "tube": self.tube.to_dict(), "shift": self.shift}


def continue_log(f: MeromorphicFunction, path: np.ndarray, start: complex, max_step: float = math.pi / 2) -> np.ndarray:
    """Continue ``log f`` along sampled paths, shape ``(N, K)`` of fiber points.

    ``start`` is the value at ``path[:, 0]``.  Each step's argument change must
    stay below ``max_step``; otherwise a ``ValueError`` asks for finer paths.
    """
    vals = f(path)
    ratio = vals[:, 1:] / vals[:, :-1]
    steps = np.log(ratio)
    if np.any(np.abs(steps.imag) >= max_step):
        raise ValueError("branch continuation step too large; refine the path")
    return start + np.concatenate([np.zeros((len(path), 1)), np.cumsum(steps, axis=1)], axis=1)


class ContinuedLog:
    """``log f`` by numerical continuation along axis-parallel paths.

    Independent of :class:`TubeLog`: the value at a point is obtained by
    unwrapping the argument of ``f`` along the path from a base point, first
    in ``u``, then ``v``, then ``r``, with steps refined until every step
    changes the argument by less than ``pi/2``.
    """

    lattice = Lattice.integers()

    def __init__(self, f: MeromorphicFunction, tube: Tube, base=(0.0, 0.0, 0.1), base_log: complex | None = None,
                 steps: int = 64, max_refine: int = 8):
        self.f = f
        self.tube = tube
        self.base = np.asarray(base, dtype=float)
        z_base = tube.fiber_point(self.base[None, :])[0]
        self.base_log = cmath.log(complex(f(z_base))) if base_log is None else complex(base_log)
        self.steps = steps
        self.max_refine = max_refine
        periods = []
        for axis in (0, 1):
            end = self.base.copy()
            end[axis] += 1.0
            raw = self.value(end[None, :])[0] - self.base_log
            periods.append(round_to_lattice(raw, Z1, tolerance=1e-8))
        self.periods = tuple(periods)

    def _leg(self, start: np.ndarray, end: np.ndarray, logs: np.ndarray) -> np.ndarray:
        n = self.steps
        for _ in range(self.max_refine):
            t = np.linspace(0.0, 1.0, n + 1)
            pts = start[:, None, :] + t[None, :, None] * (end - start)[:, None, :]
            z = self.tube.fiber_point(pts.reshape(-1, 3)).reshape(len(start), n + 1)
            try:
                return continue_log(self.f, z, 0.0)[:, -1] + logs
            except ValueError:
                n *= 2
        raise ValueError("branch continuation did not converge; path passes too close to the divisor")

    def value(self, X):
        X = np.asarray(X, dtype=float)
        p0 = np.repeat(self.base[None, :], len(X), axis=0)
        logs = np.full(len(X), self.base_log, dtype=complex)
        for axis in (0, 1, 2):
            p1 = p0.copy()
            p1[:, axis] = X[:, axis]
            logs = self._leg(p0, p1, logs)
            p0 = p1
        return logs

    def grad(self, X):
        X = np.asarray(X, dtype=float)
        z = self.tube.fiber_point(X)
        w = self.tube.local(X)
        if self.tube.at_infinity:
            # d/dw log f(1/w) = -f'/f(z) / w^2
            dldw = -self.f.log_derivative(z) / w**2
        else:
            dldw = self.f.log_derivative(z)
        return dldw[:, None] * self.tube.local_derivatives(X)

    def to_dict(self) -> dict:
        return {
            "type": "continued_log",
            "f": self.f.to_dict(),
            "tube": self.tube.to_dict(),
            "base": self.base.tolist(),
            "base_log": {"re": self.base_log.real, "im": self.base_log.imag},
        }


class FlowPrimitive:
    """``2*pi*i * s`` along a tube where ``omega = ds`` and ``s = period*u + s_start - s0``.

    ``s0`` is the flow time of the global base point, so values are primitives of
    ``2*pi*i*omega`` normalized at that base point.
    """

    def __init__(self, tube: Tube, lattice: Lattice = Lattice.integers(), s_start: float = 0.0, s0: float = 0.0):
        self.tube = tube
        self.lattice = lattice
        self.s_start = float(s_start)
        self.s0 = float(s0)
        lat = lattice.with_twist(1)
        if not lattice.is_integers:
            raise ValueError("flow primitives of suspension flows have integer periods")
        self.periods = (lat.element((tube.period,)), lat.zero())

    def value(self, X):
        X = np.asarray(X, dtype=float)
        return TWO_PI_I * (self.tube.period * X[:, 0] + self.s_start - self.s0)

    def grad(self, X):
        out = np.zeros((len(X), 3), dtype=complex)
        out[:, 0] = TWO_PI_I * self.tube.period
        return out

    def to_dict(self) -> dict:
        return {"type": "flow_primitive", "tube": self.tube.to_dict(), "s_start": self.s_start, "s0": self.s0}


def lifted_from_dict(data: dict):
    kind = data["type"]
    if kind == "tube_log":
        return TubeLog(MeromorphicFunction.from_dict(data["f"]), Tube.from_dict(data["tube"]), data.get("shift", 0))
    if kind == "continued_log":
        b = data["base_log"]
        return ContinuedLog(MeromorphicFunction.from_dict(data["f"]), Tube.from_dict(data["tube"]), data["base"],
                            complex(b["re"], b["im"]))
    if kind == "flow_primitive":
        return FlowPrimitive(Tube.from_dict(data["tube"]), s_start=data["s_start"], s0=data["s0"])
    raise ValueError(f"unknown lifted function type {kind!r}")
