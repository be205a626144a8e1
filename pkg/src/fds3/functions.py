"""Rational functions on the Riemann sphere stored by divisor and scale."""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

INF = "inf"


def _is_inf(p) -> bool:
    return isinstance(p, str) and p == INF


def point_key(p) -> tuple:
    """Deterministic order on fiber points: finite points by (re, im), then infinity."""
    if _is_inf(p):
        return (1, 0.0, 0.0)
    p = complex(p)
    return (0, round(p.real, 12), round(p.imag, 12))


@dataclass(frozen=True)
class MeromorphicFunction:
    """``f(z) = scale * prod (z - a)^m`` over the finite part of the divisor.

    ``divisor`` lists ``(point, multiplicity)`` pairs including the point at
    infinity (``"inf"``); its multiplicity must equal minus the finite sum.
    """

    divisor: tuple
    scale: complex = 1.0

    def __post_init__(self):
        if self.scale == 0:
            raise ValueError("scale must be nonzero")
        merged: dict = {}
        for p, m in self.divisor:
            key = INF if _is_inf(p) else complex(p)
            if not _is_inf(key):
                # merge points equal up to rounding noise
                for q in merged:
                    if not _is_inf(q) and abs(q - key) < 1e-12:
                        key = q
                        break
            merged[key] = merged.get(key, 0) + int(m)
        merged = {p: m for p, m in merged.items() if m != 0}
        finite = sum(m for p, m in merged.items() if not _is_inf(p))
        at_inf = merged.get(INF, 0)
        if at_inf != -finite:
            raise ValueError(
                f"divisor has degree {finite + at_inf}; multiplicity at infinity must be {-finite}"
            )
        items = tuple(sorted(merged.items(), key=lambda pm: point_key(pm[0])))
        object.__setattr__(self, "divisor", items)
        object.__setattr__(self, "scale", complex(self.scale))

    @classmethod
    def from_finite(cls, zeros_poles: Sequence[tuple[complex, int]], scale: complex = 1.0) -> "MeromorphicFunction":
        finite = sum(int(m) for _, m in zeros_poles)
        div = list(zeros_poles)
        if finite:
            div.append((INF, -finite))
        return cls(tuple(div), scale)

    @classmethod
    def constant(cls, c: complex) -> "MeromorphicFunction":
        return cls((), c)

    @property
    def finite_divisor(self) -> list[tuple[complex, int]]:
        return [(complex(p), m) for p, m in self.divisor if not _is_inf(p)]

    @property
    def support(self) -> list:
        return [p for p, _ in self.divisor]

    def order(self, p) -> int:
        if _is_inf(p):
            return dict(self.divisor).get(INF, 0)
        p = complex(p)
        for q, m in self.divisor:
            if not _is_inf(q) and abs(complex(q) - p) < 1e-12:
                return m
        return 0

    @property
    def is_constant(self) -> bool:
        return not self.divisor

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.scale, dtype=complex)
        for a, m in self.finite_divisor:
            out = out * (z - a) ** m
        return out

    def log_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for a, m in self.finite_divisor:
            out = out + m / (z - a)
        return out

    def leading_coefficient(self, p) -> complex:
        """``u(p)`` where ``f = u * t^ord`` in the local coordinate ``t`` at ``p``.

        The local coordinate is ``z - p`` at finite points and ``1/z`` at infinity.
        """
        if _is_inf(p):
            # f(1/w) = scale * w^(-sum m) * prod (1 - a w)^m
            return self.scale
        p = complex(p)
        out = self.scale
        for a, m in self.finite_divisor:
            if abs(a - p) < 1e-12:
                continue
            out *= (p - a) ** m
        return out

    def min_distance(self, p) -> float:
        """Distance from ``p`` to the rest of the finite divisor (inf if none)."""
        ds = [abs(a - complex(p)) for a, _ in self.finite_divisor if _is_inf(p) or abs(a - complex(p)) > 1e-12]
        return min(ds) if ds else math.inf

    def is_rotation_invariant(self, k: int) -> bool:
        zeta = cmath.exp(2j * math.pi / k)
        fin = self.finite_divisor
        if sum(m for _, m in fin) % k:
            return False
        for a, m in fin:
            if abs(a) < 1e-12:
                continue
            b = a * zeta
            if not any(abs(b - c) < 1e-9 and mm == m for c, mm in fin):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "divisor": [
                {"point": INF if _is_inf(p) else {"re": complex(p).real, "im": complex(p).imag}, "mult": m}
                for p, m in self.divisor
            ],
            "scale": {"re": self.scale.real, "im": self.scale.imag},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MeromorphicFunction":
        div = []
        for e in data["divisor"]:
            p = e["point"]
            div.append((INF if p == INF else complex(p["re"], p["im"]), e["mult"]))
        s = data["scale"]
        return cls(tuple(div), complex(s["re"], s["im"]))

    def __str__(self) -> str:
        parts = [] if self.scale == 1 else [_fmt(self.scale)]
        for a, m in self.finite_divisor:
            base = "z" if a == 0 else f"(z-{_fmt(a)})"
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts) or "1"


def _fmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:g}"
    return f"({c.real:g}{c.imag:+g}i)"


def tame_symbol(f: MeromorphicFunction, g: MeromorphicFunction, p) -> complex:
    """``(-1)^{mn} f^n / g^m`` at ``p`` with ``m = ord_p f`` and ``n = ord_p g``."""
    m, n = f.order(p), g.order(p)
    return (-1) ** (m * n) * f.leading_coefficient(p) ** n / g.leading_coefficient(p) ** m


def weil_product(f: MeromorphicFunction, g: MeromorphicFunction) -> complex:
    pts = {point_key(p): p for p in f.support + g.support}
    out = 1.0 + 0j
    for key in sorted(pts):
        out *= tame_symbol(f, g, pts[key])
    return out


_ALLOWED = re.compile(r"^[0-9zZiIjJ+\-*/^().\s]*$")


class ExpressionError(ValueError):
    pass


def parse_function(text: str) -> MeromorphicFunction:
    """Parse a rational expression in ``z`` with complex literals such as ``2+3i``.

    Numerator and denominator are factored exactly; an expression whose roots
    cannot be found in closed form is rejected.
    """
    import sympy
    from sympy.parsing.sympy_parser import (
        convert_xor,
        implicit_multiplication_application,
        parse_expr,
        standard_transformations,
    )

    if not text or not text.strip():
        raise ExpressionError("empty expression")
    if not _ALLOWED.match(text):
        bad = sorted(set(ch for ch in text if not _ALLOWED.match(ch)))
        raise ExpressionError(f"invalid characters in expression {text!r}: {''.join(bad)!r}")
    z = sympy.Symbol("z")
    local = {"z": z, "Z": z, "i": sympy.I, "I": sympy.I, "j": sympy.I, "J": sympy.I}
    try:
        expr = parse_expr(
            text,
            local_dict=local,
            transformations=standard_transformations + (implicit_multiplication_application, convert_xor),
            evaluate=True,
        )
    except Exception as exc:  # sympy raises several unrelated types
        raise ExpressionError(f"cannot parse {text!r}: {exc}") from exc
    if expr.free_symbols - {z}:
        raise ExpressionError(f"unexpected symbols in {text!r}")
    num, den = sympy.fraction(sympy.together(sympy.nsimplify(expr, rational=True)))
    if num == 0:
        raise ExpressionError("the zero function has no divisor")
    div: list[tuple[complex, int]] = []
    lead = complex(1)
    for poly_expr, sign in ((num, 1), (den, -1)):
        poly = sympy.Poly(sympy.expand(poly_expr), z)
        roots = sympy.roots(poly, multiple=False)
        if sum(roots.values()) != poly.degree():
            raise ExpressionError(f"cannot factor {poly_expr} exactly; give the function in factored form")
        for r, m in roots.items():
            div.append((complex(sympy.N(r, 30)), sign * int(m)))
        lc = complex(sympy.N(poly.LC(), 30))
        lead = lead * lc if sign == 1 else lead / lc
    return MeromorphicFunction.from_finite(div, lead)
