"""Triangulated torus meshes, flags, index maps and integration of Deligne classes."""
from __future__ import annotations

from .integration import integrate_deligne, integrate_prism, integrate_simplex, stokes_check
from .mesh import (
    IndexMap,
    TorusMesh,
    alternate_index_map,
    build_torus_mesh,
    default_index_map,
    enumerate_flags,
)

__all__ = [
    "IndexMap", "TorusMesh", "alternate_index_map", "build_torus_mesh", "default_index_map", "enumerate_flags",
    "integrate_deligne", "integrate_prism", "integrate_simplex", "stokes_check",
]
