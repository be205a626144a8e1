"""Čech cochains with form coefficients, Deligne classes, cup products and curvature."""
from __future__ import annotations

from .cech import (
    AffineFunction,
    DeligneClass,
    cech_delta,
    class_of_form,
    class_of_function,
    class_of_lifted,
    cup,
    curvature,
    deligne_cocycle_check,
)
from .cover import GoodCover, grid_cover
from .lattice import Lattice, lattice_reduce

__all__ = [
    "AffineFunction", "DeligneClass", "GoodCover", "Lattice", "cech_delta", "class_of_form", "class_of_function",
    "class_of_lifted", "cup", "curvature", "deligne_cocycle_check", "grid_cover", "lattice_reduce",
]
