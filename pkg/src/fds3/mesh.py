"""Triangulated square tori, flags of simplices and chart index maps.

Vertex ``(a, b)`` of the ``N x N`` grid (``N = 3r``) sits at
``u = b/N`` (longitude) and ``v = a/N`` (meridian).  Each grid cell carries a
horizontal, a vertical and an anti-diagonal edge (from the top-left to the
bottom-right corner) and two counterclockwise triangles.  Simplices keep
lifted vertex coordinates so that wrap-around cells stay geometrically
consistent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cover import GoodCover


@dataclass(frozen=True)
class Simplex:
    key: tuple
    vertices: tuple[int, ...]
    coords: tuple[tuple[Fraction, Fraction], ...]

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def points(self) -> np.ndarray:
        """Lifted ``(u, v)`` vertex coordinates as floats, shape ``(dim+1, 2)``."""
        return np.array([[float(x), float(y)] for x, y in self.coords])

    def barycenter(self) -> tuple[Fraction, Fraction]:
        k = len(self.coords)
        return (sum(c[0] for c in self.coords) / k, sum(c[1] for c in self.coords) / k)


@dataclass(frozen=True)
class Flag:
    """Nested simplices ordered from the smallest to the largest."""

    simplices: tuple[Simplex, ...]
    sign: int = 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.simplices)


def boundary_sign(face: Simplex, cell: Simplex) -> int:
    """Sign of ``face`` (with its stored orientation) in the boundary of ``cell``."""
    if cell.dim != face.dim + 1:
        raise ValueError("face must have codimension one")
    if not set(face.vertices) <= set(cell.vertices):
        raise ValueError("face is not contained in cell")
    missing = [v for v in cell.vertices if v not in face.vertices]
    if len(missing) != 1:
        raise ValueError("face is not a facet")
    j = cell.vertices.index(missing[0])
    induced = [v for v in cell.vertices if v != missing[0]]
    # orientation of face relative to the ordered facet [v0..^vj..vk] is a permutation sign
    perm = [induced.index(v) for v in face.vertices]
    sign = 1
    for i in range(len(perm)):
        for k in range(i + 1, len(perm)):
            if perm[i] > perm[k]:
                sign = -sign
    return (-1) ** j * sign


class TorusMesh:
    def __init__(self, refinement: int = 1):
        if not isinstance(refinement, (int, np.integer)) or refinement < 1:
            raise ValueError("refinement must be a positive integer")
        self.refinement = int(refinement)
        N = 3 * self.refinement
        self.N = N
        self.vertices: list[Simplex] = []
        self.edges: list[Simplex] = []
        self.triangles: list[Simplex] = []

        def vid(a, b):
            return (a % N) * N + (b % N)

        def xy(a, b):
            return (Fraction(b, N), Fraction(a, N))

        def make(key, corners):
            return Simplex(key, tuple(vid(a, b) for a, b in corners), tuple(xy(a, b) for a, b in corners))

        for a in range(N):
            for b in range(N):
                self.vertices.append(make(("P", a, b), [(a, b)]))
        for a in range(N):
            for b in range(N):
                self.edges.append(make(("H", a, b), [(a, b), (a, b + 1)]))
                self.edges.append(make(("V", a, b), [(a, b), (a + 1, b)]))
                self.edges.append(make(("D", a, b), [(a + 1, b), (a, b + 1)]))
        for a in range(N):
            for b in range(N):
                self.triangles.append(make(("L", a, b), [(a, b), (a, b + 1), (a + 1, b)]))
                self.triangles.append(make(("U", a, b), [(a, b + 1), (a + 1, b + 1), (a + 1, b)]))
        self._by_vertices = {frozenset(s.vertices): s for s in self.simplices()}
        if len(self._by_vertices) != len(self.vertices) + len(self.edges) + len(self.triangles):
            raise RuntimeError("mesh has duplicate simplices")

    def simplices(self, dim: int | None = None) -> list[Simplex]:
        if dim is None:
            return self.vertices + self.edges + self.triangles
        return [self.vertices, self.edges, self.triangles][dim]

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.triangles)

    def face(self, cell: Simplex, drop: int) -> Simplex:
        """The facet of ``cell`` missing vertex position ``drop``, with the mesh's orientation
        and coordinates taken from ``cell`` (so it lies in the same lift)."""
        verts = frozenset(v for n, v in enumerate(cell.vertices) if n != drop)
        stored = self._by_vertices[verts]
        coord = {v: c for v, c in zip(cell.vertices, cell.coords)}
        return Simplex(stored.key, stored.vertices, tuple(coord[v] for v in stored.vertices))

    def faces(self, cell: Simplex) -> list[Simplex]:
        return [self.face(cell, j) for j in range(cell.dim + 1)]

    def meridian_cycle(self, column: int = 0) -> list[Simplex]:
        return [e for e in self.edges if e.key[0] == "V" and e.key[2] == column]

    def longitude_cycle(self, row: int = 0) -> list[Simplex]:
        return [e for e in self.edges if e.key[0] == "H" and e.key[1] == row]

    def edge_counts(self) -> dict:
        count: dict = {}
        for t in self.triangles:
            for e in self.faces(t):
                count[e.key] = count.get(e.key, 0) + 1
        return count

    def to_dict(self) -> dict:
        return {
            "refinement": self.refinement,
            "vertices": [[float(x) for x in s.coords[0]] for s in self.vertices],
            "edges": [list(s.vertices) for s in self.edges],
            "triangles": [list(s.vertices) for s in self.triangles],
        }


def build_torus_mesh(r: int) -> TorusMesh:
    return TorusMesh(r)


def enumerate_flags(
    mesh: TorusMesh,
    n: int,
    i: int,
    top: Sequence[Simplex] | None = None,
    top_signs: Sequence[int] | None = None,
) -> list[Flag]:
    """Flags ``sigma^{n-1-i} < ... < sigma^{n-1}`` with their orientation sign.

    ``top`` restricts the top simplices (a sub-mesh such as an edge cycle);
    by default all simplices of dimension ``n-1`` are used.  The sign is the
    product of the top simplex's sign and the boundary signs along the flag.
    """
    if not 1 <= n <= 3:
        raise ValueError("n must be 1, 2 or 3")
    if not 0 <= i <= n - 1:
        raise ValueError("need 0 <= i <= n-1")
    if top is None:
        top = mesh.simplices(n - 1)
    top = list(top)
    signs = list(top_signs) if top_signs is not None else [1] * len(top)
    if any(s.dim != n - 1 for s in top):
        raise ValueError(f"top simplices must have dimension {n - 1}")
    flags = [Flag((s,), sg) for s, sg in zip(top, signs)]
    for _ in range(i):
        nxt = []
        for fl in flags:
            cell = fl.simplices[0]
            for face in mesh.faces(cell):
                nxt.append(Flag((face,) + fl.simplices, fl.sign * boundary_sign(face, cell)))
        flags = nxt
    return flags


def brute_force_flag_count(mesh: TorusMesh, n: int, i: int) -> int:
    """Count chains by vertex-set containment over all simplex pairs."""
    chains = [[s] for s in mesh.simplices(n - 1)]
    for step in range(i):
        dim = n - 2 - step
        nxt = []
        for ch in chains:
            small = set(ch[0].vertices)
            for s in mesh.simplices(dim):
                if set(s.vertices) <= small:
                    nxt.append([s] + ch)
        chains = nxt
    return len(chains)


@dataclass
class IndexMap:
    assignment: dict
    rule: str = "barycenter"
    _lookup: dict = field(default_factory=dict, repr=False)

    def __call__(self, s: Simplex):
        return self.assignment[s.key]

    def check(self, mesh: TorusMesh, cover: GoodCover) -> None:
        for s in mesh.simplices():
            cid = self.assignment.get(s.key)
            if cid is None:
                raise ValueError(f"simplex {s.key} has no chart")
            if not cover.contains_simplex(cid, s.points()):
                raise ValueError(f"simplex {s.key} is not inside chart {cid}")

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "assignment": [{"simplex": list(k), "chart": list(v)} for k, v in sorted(self.assignment.items())],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IndexMap":
        return cls({tuple(e["simplex"]): tuple(e["chart"]) for e in data["assignment"]}, data["rule"])


def default_index_map(mesh: TorusMesh, cover: GoodCover) -> IndexMap:
    """Assign each simplex the grid chart whose half-open cell contains its barycentre.

    Barycentres are computed exactly.  At refinement 1 every chart receives
    one vertex, three edges and two triangles.
    """
    r = mesh.refinement
    assignment = {}
    for s in mesh.simplices():
        bu, bv = s.barycenter()
        # grid units, then the coarse 3x3 cell
        col = int((bu * mesh.N) // r) % 3
        row = int((bv * mesh.N) // r) % 3
        cid = (row + 1, col + 1)
        if cid not in cover.boxes:
            raise ValueError("cover is not the 3x3 grid cover")
        if not cover.contains_simplex(cid, s.points()):
            raise ValueError(f"simplex {s.key} is not contained in chart {cid}")
        assignment[s.key] = cid
    return IndexMap(assignment, "barycenter")


def alternate_index_map(mesh: TorusMesh, cover: GoodCover) -> IndexMap:
    """Assign each simplex the first chart (in chart order) that contains it."""
    assignment = {}
    for s in mesh.simplices():
        pts = s.points()
        for cid in cover.chart_ids:
            if cover.contains_simplex(cid, pts):
                assignment[s.key] = cid
                break
        else:
            raise ValueError(f"simplex {s.key} is not contained in any chart")
    return IndexMap(assignment, "first-containing")


def chart_load(index_map: IndexMap) -> dict:
    """Number of simplices of each dimension per chart."""
    out: dict = {}
    for key, cid in index_map.assignment.items():
        dim = {"P": 0, "H": 1, "V": 1, "D": 1, "L": 2, "U": 2}[key[0]]
        out.setdefault(cid, [0, 0, 0])[dim] += 1
    return out


def mesh_json(mesh: TorusMesh, index_map: IndexMap | None = None) -> str:
    doc = {"mesh": mesh.to_dict()}
    if index_map is not None:
        doc["index_map"] = index_map.to_dict()
    return json.dumps(doc, sort_keys=True)


def iter_flags(mesh: TorusMesh, n: int, top: Iterable[Simplex] | None = None, signs=None):
    for i in range(n):
        yield i, enumerate_flags(mesh, n, i, top, signs)
