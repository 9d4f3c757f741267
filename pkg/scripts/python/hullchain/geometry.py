"""Planar convex hulls, homogeneous halfspace cuts and polytope membership.

A cut is a weight vector ``w`` of length n+1 acting on the lifted point
``x~ = (x1, ..., xn, 1)``; the last entry is the bias slot holding ``-theta``.
A point is outside the cut iff ``w . x~ > TOLERANCE``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Iterable, Sequence

from .errors import DegenerateHull, DimensionError, EmptyInput

logger = logging.getLogger(__name__)

# Absolute tolerance on raw (unnormalized) homogeneous products.
TOLERANCE = 1e-9

Point = tuple[float, ...]


class ClassLabel(StrEnum):
    POS = "pos"
    NEG = "neg"

    @property
    def opposite(self) -> "ClassLabel":
        return ClassLabel.NEG if self is ClassLabel.POS else ClassLabel.POS


def as_point(x: Iterable[float], dimension: int | None = None) -> Point:
    """Coerce ``x`` to a tuple of finite floats, optionally checking its length."""
    try:
        coords = tuple(float(v) for v in x)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"not a coordinate vector: {x!r}") from exc
    if not coords:
        raise DimensionError("coordinate vector is empty")
    if dimension is not None and len(coords) != dimension:
        raise DimensionError(f"expected {dimension} coordinates, got {len(coords)}")
    if not all(math.isfinite(v) for v in coords):
        raise DimensionError(f"coordinates must be finite: {coords}")
    return coords


def lift(x: Sequence[float]) -> Point:
    """Homogeneous lift (x1, ..., xn, 1)."""
    return (*x, 1.0)


def dot_lifted(weights: Sequence[float], lifted):
    """Left-to-right weighted sum over a lifted point.

    ``lifted`` entries may be floats or NumPy columns; the summation order is
    fixed so scalar and batched evaluation produce identical doubles.
    """
    total = 0.0
    for w, v in zip(weights, lifted):
        total = total + w * v
    return total


@dataclass(frozen=True)
class LabeledPoint:
    coords: Point
    label: ClassLabel

    def __post_init__(self):
        object.__setattr__(self, "coords", as_point(self.coords))
        object.__setattr__(self, "label", ClassLabel(self.label))

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Cut:
    """One linear cut; the positive side (``value > TOLERANCE``) is the exterior."""

    weights: Point
    degenerate_cap: bool = False

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if len(weights) < 2:
            raise DimensionError(f"cut needs at least 2 weights, got {len(weights)}")
        object.__setattr__(self, "weights", weights)

    @property
    def dimension(self) -> int:
        return len(self.weights) - 1

    @property
    def normal(self) -> Point:
        return self.weights[:-1]

    def value(self, x: Sequence[float]) -> float:
        return dot_lifted(self.weights, lift(x))

    def is_outside(self, x: Sequence[float]) -> bool:
        return self.value(x) > TOLERANCE


@dataclass(frozen=True)
class Polytope:
    """One nesting level R_k: hull vertices, their cuts and the generating class."""

    vertices: tuple[Point, ...]
    cuts: tuple[Cut, ...]
    generator_class: ClassLabel
    level: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(as_point(v) for v in self.vertices))
        object.__setattr__(self, "cuts", tuple(self.cuts))
        object.__setattr__(self, "generator_class", ClassLabel(self.generator_class))
        if not self.cuts:
            raise DegenerateHull(f"polytope R{self.level} has no cuts")
        dims = {c.dimension for c in self.cuts} | {len(v) for v in self.vertices}
        if len(dims) != 1:
            raise DimensionError(f"polytope R{self.level} mixes dimensions {sorted(dims)}")
        if self.level < 1:
            raise ValueError(f"polytope level must be positive, got {self.level}")

    @property
    def dimension(self) -> int:
        return self.cuts[0].dimension

    @property
    def is_degenerate(self) -> bool:
        return any(c.degenerate_cap for c in self.cuts)


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Iterable[Sequence[float]]) -> list[Point]:
    """Counterclockwise hull vertices (monotone chain), collinear vertices dropped.

    Starts at the lexicographically smallest point. One distinct point gives
    that point; collinear input gives its two extreme endpoints.
    """
    pts = [as_point(p) for p in points]
    if not pts:
        raise EmptyInput("convex hull of an empty point list")
    bad = [p for p in pts if len(p) != 2]
    if bad:
        raise DimensionError(f"convex_hull_2d needs 2-D points, got {bad[0]}")

    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    # all-collinear input collapses to its two endpoints here
    return lower[:-1] + upper[:-1]


def polygon_area(vertices: Sequence[Point]) -> float:
    """Signed shoelace area; positive for counterclockwise order."""
    total = 0.0
    for i, a in enumerate(vertices):
        b = vertices[(i + 1) % len(vertices)]
        total += a[0] * b[1] - b[0] * a[1]
    return total / 2.0


def cuts_from_hull(vertices: Sequence[Sequence[float]]) -> list[Cut]:
    """One outward-facing cut per edge a->b of a counterclockwise polygon."""
    verts = [as_point(v, 2) for v in vertices]
    if len(verts) < 3:
        raise DegenerateHull(f"need at least 3 hull vertices, got {len(verts)}")
    if polygon_area(verts) <= 0.0:
        raise DegenerateHull("hull has zero area or clockwise orientation")

    cuts = []
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        cuts.append(Cut((b[1] - a[1], a[0] - b[0], a[1] * b[0] - a[0] * b[1])))
    return cuts


def degenerate_cuts(vertices: Sequence[Sequence[float]]) -> list[Cut]:
    """Exact cap-cut representation of a point or segment hull."""
    verts = [as_point(v, 2) for v in vertices]
    if len(verts) == 2 and verts[0] == verts[1]:
        verts = verts[:1]

    if len(verts) == 1:
        (px, py), = verts
        return [
            Cut((1.0, 0.0, -px), degenerate_cap=True),
            Cut((-1.0, 0.0, px), degenerate_cap=True),
            Cut((0.0, 1.0, -py), degenerate_cap=True),
            Cut((0.0, -1.0, py), degenerate_cap=True),
        ]
    if len(verts) == 2:
        a, b = verts
        dx, dy = b[0] - a[0], b[1] - a[1]
        line = (-dy, dx, dy * a[0] - dx * a[1])
        return [
            Cut(line, degenerate_cap=True),
            Cut(tuple(-w for w in line), degenerate_cap=True),
            Cut((-dx, -dy, dx * a[0] + dy * a[1]), degenerate_cap=True),
            Cut((dx, dy, -(dx * b[0] + dy * b[1])), degenerate_cap=True),
        ]
    raise DegenerateHull(f"degenerate_cuts expects 1 or 2 vertices, got {len(verts)}")


def hull_cuts(vertices: Sequence[Point]) -> list[Cut]:
    if len(vertices) >= 3:
        return cuts_from_hull(vertices)
    return degenerate_cuts(vertices)


def hull_polytope(points: Iterable[Sequence[float]], generator_class: ClassLabel, level: int) -> Polytope:
    """Hull a planar point set into one nesting level."""
    vertices = convex_hull_2d(points)
    cuts = hull_cuts(vertices)
    logger.debug("R%d: %d vertices, %d cuts (%s)", level, len(vertices), len(cuts), generator_class)
    return Polytope(tuple(vertices), tuple(cuts), generator_class, level)


def polytope_contains(p: Polytope, x: Sequence[float]) -> bool:
    """Closed membership: inside-or-on every cut, within TOLERANCE."""
    lifted = lift(as_point(x, p.dimension))
    return all(dot_lifted(c.weights, lifted) <= TOLERANCE for c in p.cuts)


def nearest_cut_distance(hulls: Sequence[Polytope], x: Sequence[float]) -> float:
    """Euclidean distance from ``x`` to the closest cut hyperplane of any hull."""
    if not hulls:
        raise EmptyInput("nearest_cut_distance needs at least one hull")
    lifted = lift(as_point(x, hulls[0].dimension))
    best = math.inf
    for hull in hulls:
        if hull.dimension != len(lifted) - 1:
            raise DimensionError(f"hull R{hull.level} has dimension {hull.dimension}")
        for cut in hull.cuts:
            norm = math.hypot(*cut.normal)
            if norm > 0.0:
                best = min(best, abs(dot_lifted(cut.weights, lifted)) / norm)
    return best


@dataclass(frozen=True)
class BoundingBox:
    lower: Point
    upper: Point

    @classmethod
    def around(cls, points: Iterable[Sequence[float]]) -> "BoundingBox":
        pts = [as_point(p) for p in points]
        if not pts:
            raise EmptyInput("bounding box of an empty point list")
        columns = list(zip(*pts))
        return cls(tuple(min(c) for c in columns), tuple(max(c) for c in columns))

    @property
    def extent(self) -> Point:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    def padded(self, fraction: float = 0.1, minimum: float = 0.5) -> "BoundingBox":
        """Grow every axis by ``fraction`` of its extent, or by ``minimum`` on flat axes."""
        pads = [fraction * e if e > 0.0 else minimum for e in self.extent]
        return BoundingBox(
            tuple(lo - p for lo, p in zip(self.lower, pads)),
            tuple(hi + p for hi, p in zip(self.upper, pads)),
        )
