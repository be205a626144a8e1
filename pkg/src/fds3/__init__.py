"""Čech–Deligne cohomology on 3-dimensional foliated dynamical systems."""
from __future__ import annotations

__version__ = "0.1.0"
