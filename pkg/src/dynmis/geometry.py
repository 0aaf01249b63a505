"""Fat objects: axis-aligned hyperrectangles and balls in 1 to 4 dimensions.

Shapes are closed, so touching objects intersect. Every object carries its
enclosing hypercube and a total-order key ``(size, *center, id)`` that all
selection steps use for tie-breaking.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import DimensionError

MAX_DIM = 4

Point = tuple  # tuple[float, ...]


@dataclass(frozen=True)
class HyperRect:
    lo: Point
    hi: Point


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float


Shape = Union[HyperRect, Ball]


@dataclass(frozen=True)
class EnclosingCube:
    center: Point
    size: float

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def lo(self) -> Point:
        h = self.size / 2
        return tuple(c - h for c in self.center)

    @property
    def hi(self) -> Point:
        h = self.size / 2
        return tuple(c + h for c in self.center)


def _point(coords: Sequence[float]) -> Point:
    p = tuple(float(c) for c in coords)
    if not 1 <= len(p) <= MAX_DIM:
        raise DimensionError(f"dimension must be in 1..{MAX_DIM}, got {len(p)}")
    if not all(math.isfinite(c) for c in p):
        raise ValueError(f"non-finite coordinate in {p}")
    return p


@dataclass(frozen=True)
class FatObject:
    """A geometric object with a stable integer identity.

    Besides the two dataclass fields, construction precomputes the bounding
    box, the ``2d``-dimensional lift ``(*bbox_lo, *bbox_hi)`` used by the kd-tree,
    the enclosing cube and the order ``key``.
    """

    id: int
    shape: Shape

    def __post_init__(self):
        s = self.shape
        if isinstance(s, HyperRect):
            lo, hi = _point(s.lo), _point(s.hi)
            if len(lo) != len(hi):
                raise DimensionError("lo and hi differ in dimension")
            if any(a > b for a, b in zip(lo, hi)):
                raise ValueError(f"rect {self.id}: lo must be <= hi on every axis")
            object.__setattr__(self, "shape", HyperRect(lo, hi))
            size = max(b - a for a, b in zip(lo, hi))
            center = tuple((a + b) / 2 for a, b in zip(lo, hi))
            is_rect = True
        elif isinstance(s, Ball):
            c = _point(s.center)
            r = float(s.radius)
            if not (r > 0 and math.isfinite(r)):
                raise ValueError(f"ball {self.id}: radius must be positive")
            object.__setattr__(self, "shape", Ball(c, r))
            lo = tuple(x - r for x in c)
            hi = tuple(x + r for x in c)
            size, center, is_rect = 2 * r, c, False
        else:
            raise TypeError(f"unsupported shape {type(s).__name__}")
        set_ = object.__setattr__
        set_(self, "dim", len(lo))
        set_(self, "is_rect", is_rect)
        set_(self, "bbox_lo", lo)
        set_(self, "bbox_hi", hi)
        set_(self, "lift", lo + hi)
        set_(self, "cube", EnclosingCube(center, size))
        set_(self, "key", (size, *center, self.id))

    # ids are unique inside a structure; equality still compares geometry
    def __hash__(self):
        return hash(self.id)


def rect(id: int, lo: Sequence[float], hi: Sequence[float]) -> FatObject:
    return FatObject(id, HyperRect(tuple(lo), tuple(hi)))


def hypercube(id: int, lo: Sequence[float], side: float) -> FatObject:
    return FatObject(id, HyperRect(tuple(lo), tuple(x + side for x in lo)))


square = hypercube


def ball(id: int, center: Sequence[float], radius: float) -> FatObject:
    return FatObject(id, Ball(tuple(center), radius))


def _check_dim(a_dim: int, b_dim: int) -> None:
    if a_dim != b_dim:
        raise DimensionError(f"dimension mismatch: {a_dim} vs {b_dim}")


def _rect_ball(lo: Point, hi: Point, c: Point, r: float) -> bool:
    d2 = 0.0
    for l, h, x in zip(lo, hi, c):
        if x < l:
            d2 += (l - x) ** 2
        elif x > h:
            d2 += (x - h) ** 2
    return d2 <= r * r


def intersects(a: FatObject, b: FatObject) -> bool:
    """True iff the closed shapes share a point."""
    _check_dim(a.dim, b.dim)
    if a.is_rect and b.is_rect:
        alo, ahi, blo, bhi = a.bbox_lo, a.bbox_hi, b.bbox_lo, b.bbox_hi
        for k in range(a.dim):
            if alo[k] > bhi[k] or blo[k] > ahi[k]:
                return False
        return True
    if not a.is_rect and not b.is_rect:
        ca, cb = a.shape.center, b.shape.center
        rr = a.shape.radius + b.shape.radius
        return sum((x - y) ** 2 for x, y in zip(ca, cb)) <= rr * rr
    if not a.is_rect:
        a, b = b, a
    return _rect_ball(a.bbox_lo, a.bbox_hi, b.shape.center, b.shape.radius)


def enclosing_cube(o: FatObject) -> EnclosingCube:
    return o.cube


def object_order(a: FatObject, b: FatObject) -> int:
    """Three-way comparison: by cube size, then center lexicographically, then id."""
    _check_dim(a.dim, b.dim)
    return (a.key > b.key) - (a.key < b.key)


class Placement(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    CROSSING = "crossing"


def classify_vs_cube(o: FatObject, s: EnclosingCube) -> Placement:
    """Position of ``o`` relative to the closed cube ``s``."""
    _check_dim(o.dim, s.dim)
    h = s.size / 2
    clo = [c - h for c in s.center]
    chi = [c + h for c in s.center]
    lo, hi = o.bbox_lo, o.bbox_hi
    if o.is_rect:
        inside = True
        for k in range(o.dim):
            if lo[k] > chi[k] or hi[k] < clo[k]:
                return Placement.OUTSIDE
            if lo[k] < clo[k] or hi[k] > chi[k]:
                inside = False
        return Placement.INSIDE if inside else Placement.CROSSING
    # a ball is inside a box iff its bounding box is
    if all(clo[k] <= lo[k] and hi[k] <= chi[k] for k in range(o.dim)):
        return Placement.INSIDE
    if _rect_ball(clo, chi, o.shape.center, o.shape.radius):
        return Placement.CROSSING
    return Placement.OUTSIDE


def linf_distance(p: Point, q: Point) -> float:
    return max(abs(a - b) for a, b in zip(p, q))


class ShapeKind(enum.Enum):
    SQUARES = "squares"
    HYPERCUBES = "hypercubes"
    DISKS = "disks"


@dataclass(frozen=True)
class ShapeClass:
    """Object family plus its fatness constant ``f`` (greedy is a 1/f-approximation)."""

    kind: ShapeKind
    dim: int = 2

    def __post_init__(self):
        if self.kind in (ShapeKind.SQUARES, ShapeKind.DISKS) and self.dim != 2:
            raise ValueError(f"{self.kind.value} are two-dimensional")
        if not 1 <= self.dim <= MAX_DIM:
            raise DimensionError(f"dimension must be in 1..{MAX_DIM}")

    @classmethod
    def squares(cls) -> "ShapeClass":
        return cls(ShapeKind.SQUARES, 2)

    @classmethod
    def hypercubes(cls, d: int) -> "ShapeClass":
        return cls(ShapeKind.HYPERCUBES, d)

    @classmethod
    def disks(cls) -> "ShapeClass":
        return cls(ShapeKind.DISKS, 2)

    @classmethod
    def parse(cls, text: str) -> "ShapeClass":
        """Parse ``squares``, ``disks`` or ``hypercubes:D``."""
        name, _, arg = text.partition(":")
        if name == "squares" and not arg:
            return cls.squares()
        if name == "disks" and not arg:
            return cls.disks()
        if name == "hypercubes":
            return cls.hypercubes(int(arg) if arg else 2)
        raise ValueError(f"unknown shape class {text!r}")

    def __str__(self):
        if self.kind is ShapeKind.HYPERCUBES:
            return f"hypercubes:{self.dim}"
        return self.kind.value

    @property
    def fatness(self) -> int:
        if self.kind is ShapeKind.SQUARES:
            return 4
        if self.kind is ShapeKind.DISKS:
            return 5
        return 2 ** self.dim

    @property
    def beta(self) -> float:
        return 1.0 / self.fatness

    @property
    def uses_balls(self) -> bool:
        return self.kind is ShapeKind.DISKS


def to_json(o: FatObject) -> dict:
    if o.is_rect:
        return {"id": o.id, "shape": "rect", "lo": list(o.shape.lo), "hi": list(o.shape.hi)}
    return {"id": o.id, "shape": "ball", "center": list(o.shape.center), "radius": o.shape.radius}


def from_json(d: dict) -> FatObject:
    kind = d.get("shape")
    if kind == "rect":
        return rect(int(d["id"]), d["lo"], d["hi"])
    if kind == "ball":
        return ball(int(d["id"]), d["center"], d["radius"])
    raise ValueError(f"unknown shape {kind!r}")
