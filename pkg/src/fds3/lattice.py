"""Period lattices and their Tate twists.

A lattice here is a finitely generated subgroup of the reals, given by its
generators.  The twisted group ``Lambda(n) = (2*pi*i)**n * Lambda`` is where
the integer parts of Deligne cocycles live.  Elements are always stored as
exact integer coefficient vectors against the generators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

TWO_PI_I = 2j * math.pi


def twist_factor(n: int) -> complex:
    """``(2*pi*i)**n``, computed without accumulating power error."""
    # (2 pi i)^n = (2 pi)^n i^n
    return (2 * math.pi) ** n * (1j ** (n % 4))


@dataclass(frozen=True)
class Lattice:
    generators: tuple[float, ...] = (1.0,)
    twist: int = 0

    def __post_init__(self):
        gens = tuple(float(g) for g in self.generators)
        if len(gens) > 3:
            raise ValueError("at most 3 lattice generators are supported")
        if any(g == 0.0 for g in gens):
            raise ValueError("lattice generators must be nonzero")
        if self.twist < 0:
            raise ValueError("twist must be non-negative")
        # canonical order: ascending absolute value, ties by value
        gens = tuple(sorted(gens, key=lambda g: (abs(g), g)))
        object.__setattr__(self, "generators", gens)

    @classmethod
    def integers(cls, twist: int = 0) -> "Lattice":
        return cls((1.0,), twist)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_integers(self) -> bool:
        return self.generators == (1.0,)

    def with_twist(self, n: int) -> "Lattice":
        return Lattice(self.generators, n)

    def element(self, coeffs: Sequence[int]) -> "LatticeElement":
        return LatticeElement(self, tuple(int(c) for c in coeffs))

    def zero(self) -> "LatticeElement":
        return LatticeElement(self, (0,) * self.rank)

    def value(self, coeffs: Sequence[int]) -> complex:
        real = math.fsum(c * g for c, g in zip(coeffs, self.generators))
        return real * twist_factor(self.twist)

    def to_dict(self) -> dict:
        return {"generators": list(self.generators), "twist": self.twist}

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        return cls(tuple(data["generators"]), int(data["twist"]))


@dataclass(frozen=True)
class LatticeElement:
    """An exact element of ``lattice``; ``coeffs`` are integers."""

    lattice: Lattice
    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if len(self.coeffs) != self.lattice.rank:
            raise ValueError(
                f"expected {self.lattice.rank} coefficients, got {len(self.coeffs)}"
            )

    @property
    def value(self) -> complex:
        return self.lattice.value(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        self._check_same(other)
        return LatticeElement(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LatticeElement") -> "LatticeElement":
        self._check_same(other)
        return LatticeElement(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LatticeElement":
        return LatticeElement(self.lattice, tuple(-a for a in self.coeffs))

    def scale(self, k: int) -> "LatticeElement":
        return LatticeElement(self.lattice, tuple(k * a for a in self.coeffs))

    def __mul__(self, other: "LatticeElement") -> "LatticeElement":
        """Product ``Lambda(n) x Lambda'(n') -> Lambda'(n+n')``; one side must be Z."""
        a, b = self.lattice, other.lattice
        twist = a.twist + b.twist
        if a.is_integers:
            k = self.coeffs[0]
            return LatticeElement(b.with_twist(twist), tuple(k * c for c in other.coeffs))
        if b.is_integers:
            k = other.coeffs[0]
            return LatticeElement(a.with_twist(twist), tuple(k * c for c in self.coeffs))
        raise ValueError(
            "lattice product needs one factor over Z (got generators "
            f"{a.generators} and {b.generators})"
        )

    def _check_same(self, other: "LatticeElement") -> None:
        if self.lattice != other.lattice:
            raise ValueError("lattice elements live in different lattices")

    def to_dict(self) -> dict:
        return {"coeffs": list(self.coeffs)}


def product_lattice(a: Lattice, b: Lattice) -> Lattice:
    if a.is_integers:
        return b.with_twist(a.twist + b.twist)
    if b.is_integers:
        return a.with_twist(a.twist + b.twist)
    raise ValueError("cup product needs one class with coefficients in Z")


@dataclass
class ReductionResult:
    """Outcome of reducing a complex number modulo a twisted lattice."""

    raw: complex
    reduced: complex
    coefficients: tuple[int, ...]
    residual: float
    tolerance: float
    verdict: str
    bookkeeping: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "raw": complex_to_json(self.raw),
            "reduced": complex_to_json(self.reduced),
            "coefficients": list(self.coefficients),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def complex_to_json(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _best_rank2(x: float, g0: float, g1: float, bound: int) -> tuple[tuple[int, int], float]:
    # scan the coefficient of the smaller generator, round the other
    c1 = np.arange(-bound, bound + 1, dtype=np.int64)
    rest = x - c1 * g1
    c0 = np.rint(rest / g0)
    ok = np.abs(c0) <= bound
    err = np.abs(rest - c0 * g0)
    err[~ok] = np.inf
    k = int(np.argmin(err))
    return (int(c0[k]), int(c1[k])), float(err[k])


def _best_rank3(x: float, gens: Sequence[float], bound: int) -> tuple[tuple[int, ...], float]:
    g0, g1, g2 = gens
    best: tuple[tuple[int, ...], float] = ((0, 0, 0), abs(x))
    c2_all = np.arange(-bound, bound + 1, dtype=np.int64)
    for c1 in range(-bound, bound + 1):
        rest = x - c1 * g1 - c2_all * g2
        c0 = np.rint(rest / g0)
        ok = np.abs(c0) <= bound
        err = np.abs(rest - c0 * g0)
        err[~ok] = np.inf
        k = int(np.argmin(err))
        if err[k] < best[1]:
            best = ((int(c0[k]), c1, int(c2_all[k])), float(err[k]))
    return best


def lattice_reduce(
    value: complex,
    lattice: Lattice,
    bound: int = 10_000,
    tolerance: float = 1e-9,
) -> ReductionResult:
    """Reduce ``value`` modulo ``lattice`` (already twisted).

    For rank one the nearest lattice point is found by rounding.  A rank two
    or three lattice is dense in the reals, so a nearest point does not exist;
    the best coefficient vector with entries bounded by ``bound`` is returned.
    """
    value = complex(value)
    factor = twist_factor(lattice.twist)
    q = value / factor
    if lattice.rank == 0:
        coeffs: tuple[int, ...] = ()
    elif lattice.rank == 1:
        coeffs = (int(round(q.real / lattice.generators[0])),)
    elif lattice.rank == 2:
        # round onto the largest generator, scan the others
        (c1, c0), _ = _best_rank2(q.real, lattice.generators[1], lattice.generators[0], bound)
        coeffs = (c0, c1)
    else:
        g = lattice.generators
        (c2, c1, c0), _ = _best_rank3(q.real, (g[2], g[1], g[0]), min(bound, 2000))
        coeffs = (c0, c1, c2)
    point = lattice.value(coeffs)
    reduced = value - point
    residual = abs(reduced)
    bookkeeping = abs(value - point - reduced)
    if residual < tolerance:
        verdict = "pass"
    elif lattice.rank >= 2 and abs(q.imag * factor) < tolerance:
        # the component along the lattice is small but not hit within bound
        verdict = "inconclusive"
    else:
        verdict = "fail"
    return ReductionResult(value, reduced, tuple(coeffs), residual, tolerance, verdict, bookkeeping)


def round_to_lattice(value: complex, lattice: Lattice, tolerance: float = 1e-8, bound: int = 1000) -> LatticeElement:
    """Exact lattice element nearest to ``value``; raises if none is within tolerance."""
    res = lattice_reduce(value, lattice, bound=bound, tolerance=tolerance)
    if not res.passed:
        raise ValueError(
            f"value {value!r} is not within {tolerance:g} of the lattice "
            f"{lattice.generators} (twist {lattice.twist}); distance {res.residual:.3e}"
        )
    return lattice.element(res.coefficients)


def looks_rational(x: float, max_denominator: int = 100, tol: float = 1e-12) -> bool:
    """True when ``x`` is within ``tol`` of p/q with q <= max_denominator."""
    frac = Fraction(x).limit_denominator(max_denominator)
    return abs(float(frac) - x) < tol


def elements_equal_mod(a: complex, b: complex, lattice: Lattice, tolerance: float, bound: int = 10_000) -> ReductionResult:
    return lattice_reduce(complex(a) - complex(b), lattice, bound=bound, tolerance=tolerance)


def iter_nonzero(elements: Iterable[LatticeElement]) -> Iterable[LatticeElement]:
    return (e for e in elements if not e.is_zero)
