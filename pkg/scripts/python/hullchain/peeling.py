"""Duplicate resolution and the alternating nested-hull sequence R1 >= R2 >= ...

R1 is the hull of the positive class. Each following region is the hull of
the opposite-class points that lie (closed, within tolerance) inside the
previous region, until no such point is left.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import DimensionError, EmptyClass, EmptyPositiveClass, PeelingStalled
from .geometry import TOLERANCE, ClassLabel, LabeledPoint, Point, Polytope, hull_polytope, polytope_contains

logger = logging.getLogger(__name__)

DedupStrategy = Literal["drop", "random"]


@dataclass(frozen=True)
class Dataset:
    points: tuple[LabeledPoint, ...]
    dimension: int
    positive_class: ClassLabel = ClassLabel.POS

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "positive_class", ClassLabel(self.positive_class))
        wrong = [p for p in self.points if p.dimension != self.dimension]
        if wrong:
            raise DimensionError(
                f"dataset dimension is {self.dimension}, point {wrong[0].coords} has {wrong[0].dimension}"
            )

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[Iterable[float], ClassLabel | str]],
        positive_class: ClassLabel | str = ClassLabel.POS,
    ) -> "Dataset":
        """Build a dataset from ``(coords, label)`` pairs, inferring the dimension."""
        points = tuple(LabeledPoint(tuple(coords), ClassLabel(label)) for coords, label in pairs)
        dimension = points[0].dimension if points else 0
        return cls(points, dimension, ClassLabel(positive_class))

    def coords_of(self, label: ClassLabel) -> list[Point]:
        return [p.coords for p in self.points if p.label is label]

    def with_positive_class(self, positive_class: ClassLabel | str) -> "Dataset":
        return Dataset(self.points, self.dimension, ClassLabel(positive_class))


@dataclass(frozen=True)
class DatasetSummary:
    pos_count: int
    neg_count: int
    within_class_duplicates: int
    conflicting_coordinates: int


def dataset_summary(d: Dataset) -> DatasetSummary:
    per_label = Counter((p.coords, p.label) for p in d.points)
    labels_by_coords: dict[Point, set[ClassLabel]] = {}
    for coords, label in per_label:
        labels_by_coords.setdefault(coords, set()).add(label)
    return DatasetSummary(
        pos_count=sum(1 for p in d.points if p.label is ClassLabel.POS),
        neg_count=sum(1 for p in d.points if p.label is ClassLabel.NEG),
        within_class_duplicates=sum(n - 1 for n in per_label.values()),
        conflicting_coordinates=sum(1 for labels in labels_by_coords.values() if len(labels) > 1),
    )


def near_conflicts(points: list[LabeledPoint]) -> list[tuple[int, int]]:
    """Index pairs ``(pos, neg)`` of distinct points within TOLERANCE of each other per coordinate.

    Such a pair sits inside each other's point-cap hull, so the two classes
    cannot be separated there.
    """
    if not points:
        return []
    coords = np.asarray([p.coords for p in points], dtype=np.float64).reshape(len(points), -1)
    is_pos = np.fromiter((p.label is ClassLabel.POS for p in points), dtype=bool, count=len(points))
    neg = np.flatnonzero(~is_pos)
    if not is_pos.any() or not len(neg):
        return []

    neg = neg[np.argsort(coords[neg, 0], kind="stable")]
    xs = coords[neg, 0]
    pairs = []
    for i in np.flatnonzero(is_pos).tolist():
        lo = np.searchsorted(xs, coords[i, 0] - 2 * TOLERANCE, side="left")
        hi = np.searchsorted(xs, coords[i, 0] + 2 * TOLERANCE, side="right")
        window = neg[lo:hi]
        close = np.abs(coords[window] - coords[i]).max(axis=1) <= TOLERANCE
        pairs.extend((i, j) for j in sorted(window[close].tolist()))
    return pairs


def dedup(d: Dataset, strategy: DedupStrategy = "drop", seed: int | None = None) -> Dataset:
    """Collapse within-class duplicates and resolve points carried by both classes.

    Points of opposite classes closer than TOLERANCE in every coordinate count
    as carried by both. ``drop`` removes every conflicting point from both
    classes; ``random`` keeps one of the two labels, chosen by a seeded
    generator. First-occurrence order is preserved.
    """
    if strategy not in ("drop", "random"):
        raise ValueError(f"unknown dedup strategy: {strategy!r}")

    labels_by_coords: dict[Point, list[ClassLabel]] = {}
    for p in d.points:
        seen = labels_by_coords.setdefault(p.coords, [])
        if p.label not in seen:
            seen.append(p.label)

    rng = np.random.default_rng(seed) if strategy == "random" else None
    kept: list[LabeledPoint] = []
    conflicts = 0
    for coords, labels in labels_by_coords.items():
        if len(labels) == 1:
            kept.append(LabeledPoint(coords, labels[0]))
            continue
        conflicts += 1
        if rng is not None:
            choice = sorted(labels)[int(rng.integers(len(labels)))]
            kept.append(LabeledPoint(coords, choice))

    near = near_conflicts(kept)
    dropped: set[int] = set()
    for pair in near:
        if rng is None:
            dropped.update(pair)
        elif not dropped.intersection(pair):
            dropped.add(pair[int(rng.integers(2))])
    kept = [p for k, p in enumerate(kept) if k not in dropped]

    logger.debug(
        "dedup(%s): %d points in, %d out, %d conflicting coordinates, %d near pairs",
        strategy, len(d.points), len(kept), conflicts, len(near),
    )
    if d.points and not kept:
        raise EmptyClass("every point was removed as a cross-class duplicate")
    return Dataset(tuple(kept), d.dimension, d.positive_class)


def peel(d: Dataset) -> list[Polytope]:
    """Alternating nested hulls, outermost first; generator classes alternate from positive."""
    if d.dimension != 2:
        raise DimensionError(f"hull peeling is planar, dataset has dimension {d.dimension}")

    generator = d.positive_class
    pools: dict[ClassLabel, list[Point]] = {
        label: list(dict.fromkeys(d.coords_of(label))) for label in ClassLabel
    }
    if not pools[generator]:
        raise EmptyPositiveClass(f"no points of the positive class '{generator}'")

    hulls: list[Polytope] = []
    candidates = pools[generator]
    while candidates:
        level = len(hulls) + 1
        hull = hull_polytope(candidates, generator, level)
        hulls.append(hull)

        other = generator.opposite
        inside = [q for q in pools[other] if polytope_contains(hull, q)]
        if level >= 2 and inside and len(inside) >= len(pools[other]):
            raise PeelingStalled(
                f"R{level} keeps all {len(inside)} {other} candidates of R{level - 1}"
            )
        logger.debug("R%d: %d %s points remain inside", level, len(inside), other)
        pools[other] = inside
        candidates = inside
        generator = other

    return hulls
