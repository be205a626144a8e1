"""Periodic points of linear Anosov maps of the 2-torus."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np


def _validate(A) -> tuple[tuple[int, int], tuple[int, int]]:
    try:
        (a, b), (c, d) = A
    except (TypeError, ValueError) as exc:
        raise ValueError("A must be a 2x2 integer matrix") from exc
    vals = [a, b, c, d]
    if any(int(x) != x for x in vals):
        raise ValueError("A must have integer entries")
    a, b, c, d = (int(x) for x in vals)
    det = a * d - b * c
    if det not in (1, -1):
        raise ValueError(f"det A = {det}; need +-1")
    # eigenvalues solve x^2 - t x + det = 0; hyperbolic iff none lies on the unit circle
    if (det == 1 and abs(a + d) <= 2) or (det == -1 and a + d == 0):
        raise ValueError(f"trace {a + d} with det {det}: A is not hyperbolic")
    return (a, b), (c, d)


def _matmul(X, Y):
    return (
        (X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]),
        (X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]),
    )


def matrix_power(A, n: int):
    A = _validate(A)
    out = ((1, 0), (0, 1))
    for _ in range(n):
        out = _matmul(out, A)
    return out


def _shifted(A, n: int):
    P = matrix_power(A, n)
    return ((P[0][0] - 1, P[0][1]), (P[1][0], P[1][1] - 1))


def cat_map_fixed_point_count(A, n: int) -> int:
    """Number of fixed points of ``A^n`` on the torus, ``|det(A^n - I)|``."""
    if n < 1:
        raise ValueError("n must be positive")
    B = _shifted(A, n)
    return abs(B[0][0] * B[1][1] - B[0][1] * B[1][0])


def enumerate_periodic_points(A, n: int) -> list[tuple[Fraction, Fraction]]:
    """All ``x`` in ``[0,1)^2`` with ``(A^n - I) x`` integral, by brute force on the ``1/D`` grid."""
    if n < 1:
        raise ValueError("n must be positive")
    B = _shifted(A, n)
    D = abs(B[0][0] * B[1][1] - B[0][1] * B[1][0])
    if D == 0:
        raise ValueError("A^n - I is singular")
    # solutions have denominators dividing D; scan a/D, b/D
    a = np.arange(D, dtype=np.int64)
    out = []
    for b in range(D):
        r0 = (B[0][0] * a + B[0][1] * b) % D
        r1 = (B[1][0] * a + B[1][1] * b) % D
        for x in a[(r0 == 0) & (r1 == 0)]:
            out.append((Fraction(int(x), D), Fraction(b, D)))
    return out


def apply(A, point: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    (a, b), (c, d) = _validate(A)
    x, y = point
    return ((a * x + b * y) % 1, (c * x + d * y) % 1)


def count_table(A, n_max: int) -> list[dict]:
    rows = []
    for n in range(1, n_max + 1):
        count = cat_map_fixed_point_count(A, n)
        brute = len(enumerate_periodic_points(A, n))
        rows.append({"n": n, "count": count, "brute_force": brute, "match": count == brute})
    return rows
