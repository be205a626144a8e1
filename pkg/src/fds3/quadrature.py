"""Gauss rules on intervals and triangles."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]``."""
    if order < 1:
        raise ValueError("quadrature order must be positive")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def unit_interval_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(order)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=None)
def triangle_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed tensor Gauss rule on the reference triangle ``(0,0), (1,0), (0,1)``.

    Returns barycentric-free reference coordinates ``(N, 2)`` and weights
    summing to 1/2.  Exact for polynomials of total degree ``2*order - 2``.
    """
    s, ws = unit_interval_rule(order)
    t, wt = unit_interval_rule(order)
    S, T = np.meshgrid(s, t, indexing="ij")
    x = S.ravel()
    y = (T * (1 - S)).ravel()
    w = (ws[:, None] * wt[None, :] * (1 - s)[:, None]).ravel()
    pts = np.column_stack([x, y])
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def integrate_interval(fn, a: float, b: float, order: int = 16) -> complex:
    x, w = unit_interval_rule(order)
    return complex(np.sum(w * np.asarray(fn(a + (b - a) * x))) * (b - a))
