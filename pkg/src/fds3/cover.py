"""Good covers of the 2-torus by periodic rectangles.

Points are given as ``(u, v, r)`` with ``u, v`` periodic of period 1 and an
optional non-periodic radial coordinate ``r`` that every chart contains.  Each
chart is an open rectangle in the universal cover; a point is *lifted* into a
chart by choosing the unique integer translate of ``(u, v)`` inside the box.
Because boxes are narrower than half a period, every non-empty intersection of
charts is a rectangle, hence contractible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

ChartId = Hashable


@dataclass(frozen=True)
class Box:
    lo: tuple[float, float]
    hi: tuple[float, float]

    def center(self) -> tuple[float, float]:
        return ((self.lo[0] + self.hi[0]) / 2, (self.lo[1] + self.hi[1]) / 2)


def _arc_intersection(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float] | None:
    # intersect [a0,a1] with the translate of [b0,b1] that meets it (arcs shorter than 1/2)
    for k in (0.0, -1.0, 1.0, -2.0, 2.0):
        lo = max(a[0], b[0] + k)
        hi = min(a[1], b[1] + k)
        if lo < hi:
            return lo, hi
    return None


@dataclass
class GoodCover:
    """A finite cover of the torus by rectangles, each strictly inside half a period."""

    chart_ids: list
    boxes: dict
    radial: tuple[float, float] = (0.05, 0.2)
    seed: int = 0
    samples_per_overlap: int = 5
    _overlap_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for cid in self.chart_ids:
            box = self.boxes[cid]
            for axis in (0, 1):
                width = box.hi[axis] - box.lo[axis]
                if not 0 < width < 0.5:
                    raise ValueError(f"chart {cid!r} has width {width} outside (0, 1/2)")
        if self.radial[0] >= self.radial[1]:
            raise ValueError("radial range must be increasing")
        self._order = {cid: n for n, cid in enumerate(self.chart_ids)}

    # -- geometry ---------------------------------------------------------
    def check_chart(self, cid) -> None:
        if cid not in self.boxes:
            raise KeyError(f"unknown chart id {cid!r}")

    def lift(self, cid, pts) -> np.ndarray:
        """Translate ``(u, v)`` of each point into the box of chart ``cid``."""
        self.check_chart(cid)
        pts = np.array(pts, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts[None, :]
        box = self.boxes[cid]
        for axis in (0, 1):
            lo = box.lo[axis]
            pts[:, axis] = lo + np.mod(pts[:, axis] - lo, 1.0)
        return pts

    def lift_offset(self, cid, pts) -> np.ndarray:
        """Integer translation that :meth:`lift` applies to ``(u, v)``."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        lifted = self.lift(cid, pts)
        return np.rint(lifted[:, :2] - pts[:, :2]).astype(int)

    def contains(self, cid, pts, strict: bool = True) -> np.ndarray:
        lifted = self.lift(cid, pts)
        box = self.boxes[cid]
        ok = np.ones(len(lifted), dtype=bool)
        for axis in (0, 1):
            if strict:
                ok &= (lifted[:, axis] > box.lo[axis]) & (lifted[:, axis] < box.hi[axis])
            else:
                ok &= (lifted[:, axis] >= box.lo[axis]) & (lifted[:, axis] <= box.hi[axis])
        return ok

    def contains_simplex(self, cid, vertices: np.ndarray) -> bool:
        """True when some integer translate of the simplex lies in the chart box."""
        vertices = np.asarray(vertices, dtype=float)
        box = self.boxes[cid]
        shift = np.zeros(2)
        for axis in (0, 1):
            shift[axis] = box.lo[axis] + np.mod(vertices[0, axis] - box.lo[axis], 1.0) - vertices[0, axis]
        for sx in (0.0, -1.0):
            for sy in (0.0, -1.0):
                moved = vertices[:, :2] + shift + np.array([sx, sy])
                if np.all(moved >= np.array(box.lo) - 1e-12) and np.all(moved <= np.array(box.hi) + 1e-12):
                    return True
        return False

    def intersection(self, charts: Sequence) -> Box | None:
        """The intersection rectangle (in the lift of the first chart) or ``None``."""
        key = tuple(charts)
        if key in self._overlap_cache:
            return self._overlap_cache[key]
        for cid in charts:
            self.check_chart(cid)
        first = self.boxes[charts[0]]
        cur = [(first.lo[0], first.hi[0]), (first.lo[1], first.hi[1])]
        result: Box | None = None
        ok = True
        for cid in charts[1:]:
            box = self.boxes[cid]
            for axis in (0, 1):
                arc = _arc_intersection(cur[axis], (box.lo[axis], box.hi[axis]))
                if arc is None:
                    ok = False
                    break
                cur[axis] = arc
            if not ok:
                break
        if ok:
            result = Box((cur[0][0], cur[1][0]), (cur[0][1], cur[1][1]))
        self._overlap_cache[key] = result
        return result

    def is_nonempty(self, charts: Sequence) -> bool:
        return self.intersection(charts) is not None

    def sample_points(self, charts: Sequence, count: int | None = None) -> np.ndarray:
        """Designated centre point followed by seeded pseudo-random points of the overlap."""
        box = self.intersection(charts)
        if box is None:
            raise ValueError(f"intersection of charts {tuple(charts)!r} is empty")
        count = self.samples_per_overlap if count is None else count
        key = repr(tuple(charts))
        # seed derived from the tuple so results do not depend on call order
        digest = sum((n + 1) * ord(ch) for n, ch in enumerate(key))
        rng = np.random.default_rng([self.seed, digest])
        c = box.center()
        r_mid = 0.5 * (self.radial[0] + self.radial[1])
        pts = [[c[0], c[1], r_mid]]
        if count > 0:
            t = rng.uniform(0.05, 0.95, size=(count, 3))
            u = box.lo[0] + t[:, 0] * (box.hi[0] - box.lo[0])
            v = box.lo[1] + t[:, 1] * (box.hi[1] - box.lo[1])
            r = self.radial[0] + t[:, 2] * (self.radial[1] - self.radial[0])
            pts.extend(np.column_stack([u, v, r]).tolist())
        return np.array(pts, dtype=float)

    def nonempty_tuples(self, length: int) -> list[tuple]:
        """All ordered tuples (repetitions allowed) with non-empty intersection."""
        key = ("tuples", length)
        if key in self._overlap_cache:
            return self._overlap_cache[key]
        out: list[tuple] = []
        if length == 1:
            out = [(c,) for c in self.chart_ids]
        else:
            for t in self.nonempty_tuples(length - 1):
                for c in self.chart_ids:
                    cand = t + (c,)
                    if self.is_nonempty(cand):
                        out.append(cand)
        self._overlap_cache[key] = out
        return out

    def chart_containing(self, point: Sequence[float]) -> object:
        pt = np.asarray(point, dtype=float)[None, :]
        for cid in self.chart_ids:
            if self.contains(cid, pt)[0]:
                return cid
        raise ValueError(f"point {tuple(point)} is not covered")

    def overlap_table(self, max_length: int = 4) -> list[dict]:
        table = []
        for length in range(2, max_length + 1):
            for t in itertools.product(self.chart_ids, repeat=length):
                if len(set(t)) != length or list(t) != sorted(t, key=self._order.get):
                    continue
                box = self.intersection(t)
                entry = {"charts": [list(c) if isinstance(c, tuple) else c for c in t], "nonempty": box is not None}
                if box is not None:
                    entry["sample"] = list(box.center())
                table.append(entry)
        return table

    def to_dict(self) -> dict:
        return {
            "charts": [
                {"id": list(c) if isinstance(c, tuple) else c, "lo": list(self.boxes[c].lo), "hi": list(self.boxes[c].hi)}
                for c in self.chart_ids
            ],
            "radial": list(self.radial),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GoodCover":
        ids = [tuple(c["id"]) if isinstance(c["id"], list) else c["id"] for c in data["charts"]]
        boxes = {i: Box(tuple(c["lo"]), tuple(c["hi"])) for i, c in zip(ids, data["charts"])}
        return cls(ids, boxes, tuple(data["radial"]), data.get("seed", 0))


def grid_cover(
    size: int = 3,
    margin: float = 0.05,
    radial: tuple[float, float] = (0.05, 0.2),
    seed: int = 0,
) -> GoodCover:
    """The ``size x size`` grid cover; chart ``(i, j)`` holds row ``i`` (meridian) and column ``j``.

    Chart ``(i, j)`` is the rectangle ``u in ((j-1)/size - margin, j/size + margin)``,
    ``v in ((i-1)/size - margin, i/size + margin)``.
    """
    if size < 3:
        raise ValueError("grid cover needs at least 3 rows and columns")
    if not 0 < margin < 0.25 / size:
        raise ValueError(f"margin must lie in (0, {0.25 / size})")
    ids = [(i, j) for i in range(1, size + 1) for j in range(1, size + 1)]
    boxes = {
        (i, j): Box(((j - 1) / size - margin, (i - 1) / size - margin), (j / size + margin, i / size + margin))
        for (i, j) in ids
    }
    return GoodCover(ids, boxes, radial, seed)


def iter_sample_sets(cover: GoodCover, tuples: Iterable[tuple], count: int | None = None):
    for t in tuples:
        yield t, cover.sample_points(t, count)
