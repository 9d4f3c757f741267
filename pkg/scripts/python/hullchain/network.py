"""Compile nested polytopes into a width-one chain of threshold units.

Every unit reads the lifted input x~ (the shortcut) plus at most one bit from
the unit before it. A polytope module is one CUT unit per facet followed by an
inverter; modules are chained innermost region first so the last bit is 1
exactly on R1 - R2 + R3 - ...
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Iterable, Sequence

from .errors import InvalidBound, NotAlternating, NotNested, ZeroWeight
from .geometry import (
    TOLERANCE,
    ClassLabel,
    Cut,
    Point,
    Polytope,
    lift,
    polytope_contains,
)

logger = logging.getLogger(__name__)

SATURATION = 2.0
INVERTER_BIAS = 0.5
INVERTER_BIT_WEIGHT = -1.0
DEFAULT_BOUND_FACTOR = 2.0

# relative slack when checking scaled norms against 1/(2B)
_NORM_SLACK = 1e-12


class UnitKind(StrEnum):
    CUT = "cut"
    INVERTER = "inverter"


@dataclass(frozen=True)
class Unit:
    """A hard-threshold unit; ``bit_weight is None`` means it reads no bit."""

    kind: UnitKind
    data_weights: Point
    bit_weight: float | None

    def __post_init__(self):
        object.__setattr__(self, "kind", UnitKind(self.kind))
        object.__setattr__(self, "data_weights", tuple(float(w) for w in self.data_weights))
        if self.bit_weight is not None:
            object.__setattr__(self, "bit_weight", float(self.bit_weight))

    @classmethod
    def inverter(cls, dimension: int) -> "Unit":
        return cls(UnitKind.INVERTER, (0.0,) * dimension + (INVERTER_BIAS,), INVERTER_BIT_WEIGHT)


@dataclass(frozen=True)
class ChainNetwork:
    dimension: int
    domain_bound: float
    units: tuple[Unit, ...]
    positive_class: ClassLabel
    saturation: float = SATURATION
    hulls: tuple[Polytope, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "positive_class", ClassLabel(self.positive_class))
        if self.hulls is not None:
            object.__setattr__(self, "hulls", tuple(self.hulls))

    @property
    def negative_class(self) -> ClassLabel:
        return self.positive_class.opposite

    def module_spans(self) -> list[range]:
        """Index ranges of the chain modules, each ending at an inverter."""
        spans, start = [], 0
        for i, unit in enumerate(self.units):
            if unit.kind is UnitKind.INVERTER:
                spans.append(range(start, i + 1))
                start = i + 1
        if start < len(self.units):
            spans.append(range(start, len(self.units)))
        return spans


@dataclass(frozen=True)
class Diagnostic:
    code: str
    detail: str
    unit_index: int | None = None

    def __str__(self) -> str:
        where = f" (unit {self.unit_index})" if self.unit_index is not None else ""
        return f"{self.code}{where}: {self.detail}"


@dataclass(frozen=True)
class NetworkSummary:
    dimension: int
    domain_bound: float
    region_count: int
    unit_count: int
    facet_counts: tuple[int, ...]
    generator_classes: tuple[ClassLabel, ...]
    positive_class: ClassLabel


def _check_bound(bound: float) -> float:
    bound = float(bound)
    if not math.isfinite(bound) or bound <= 0.0:
        raise InvalidBound(f"domain bound must be a positive finite number, got {bound}")
    return bound


def lifted_norm(x: Sequence[float]) -> float:
    return math.hypot(*lift(x))


def default_bound(points: Iterable[Sequence[float]], factor: float = DEFAULT_BOUND_FACTOR) -> float:
    """``factor`` times the largest lifted norm over ``points``."""
    norms = [lifted_norm(p) for p in points]
    if not norms:
        raise InvalidBound("cannot derive a domain bound from an empty point set")
    return _check_bound(factor * max(norms))


def scale_cut(c: Cut, bound: float) -> Cut:
    """Scale by alpha = 1 / (2 ||w|| B) so |scaled . x~| <= 1/2 whenever ||x~|| <= B."""
    bound = _check_bound(bound)
    norm = math.hypot(*c.weights)
    if norm == 0.0 or not any(c.normal):
        raise ZeroWeight(f"cut {c.weights} has a zero normal")
    alpha = 1.0 / (2.0 * norm * bound)
    return Cut(tuple(alpha * w for w in c.weights), degenerate_cap=c.degenerate_cap)


def compile_polytope_module(p: Polytope, bound: float, has_incoming_bit: bool) -> list[Unit]:
    """CUT units for every facet of ``p`` then an inverter.

    The module emits 1 iff x is inside ``p`` and the incoming bit is 0.
    """
    units = []
    for i, cut in enumerate(p.cuts):
        scaled = scale_cut(cut, bound)
        bit_weight = SATURATION if (i > 0 or has_incoming_bit) else None
        units.append(Unit(UnitKind.CUT, scaled.weights, bit_weight))
    units.append(Unit.inverter(p.dimension))
    return units


def check_hull_sequence(hulls: Sequence[Polytope]) -> None:
    """Raise unless ``hulls`` is a non-empty, alternating, nested peel result."""
    if not hulls:
        raise NotNested("hull sequence is empty")
    first = hulls[0].generator_class
    for k, hull in enumerate(hulls, start=1):
        if hull.level != k:
            raise NotAlternating(f"hull at position {k} has level {hull.level}")
        expected = first if k % 2 == 1 else first.opposite
        if hull.generator_class is not expected:
            raise NotAlternating(f"R{k} generated by {hull.generator_class}, expected {expected}")
        if hull.dimension != hulls[0].dimension:
            raise NotNested(f"R{k} has dimension {hull.dimension}, R1 has {hulls[0].dimension}")
    for outer, inner in zip(hulls, hulls[1:]):
        for v in inner.vertices:
            if not polytope_contains(outer, v):
                raise NotNested(f"vertex {v} of R{inner.level} lies outside R{outer.level}")


def compile_network(hulls: Sequence[Polytope], bound: float) -> ChainNetwork:
    """Chain the modules R_m, R_(m-1), ..., R1; each inverter feeds the next module."""
    hulls = tuple(hulls)
    check_hull_sequence(hulls)
    bound = _check_bound(bound)
    widest = max(lifted_norm(v) for hull in hulls for v in hull.vertices)
    if widest > bound:
        raise InvalidBound(f"domain bound {bound} is below the hull extent {widest}")

    units: list[Unit] = []
    for hull in reversed(hulls):
        module = compile_polytope_module(hull, bound, has_incoming_bit=bool(units))
        logger.debug("module R%d: %d units", hull.level, len(module))
        units.extend(module)

    return ChainNetwork(
        dimension=hulls[0].dimension,
        domain_bound=bound,
        units=tuple(units),
        positive_class=hulls[0].generator_class,
        saturation=SATURATION,
        hulls=hulls,
    )


def validate(net: ChainNetwork) -> list[Diagnostic]:
    """Structural and numeric invariants of a chain; empty list means clean."""
    diagnostics: list[Diagnostic] = []
    if not net.units:
        return [Diagnostic("EmptyNetwork", "network has no units")]

    if net.saturation - 0.5 <= TOLERANCE:
        diagnostics.append(
            Diagnostic("WeakSaturation", f"saturation {net.saturation} cannot override a data term of 1/2")
        )

    norm_limit = 1.0 / (2.0 * net.domain_bound) if net.domain_bound > 0 else math.inf
    for i, unit in enumerate(net.units):
        if len(unit.data_weights) != net.dimension + 1:
            diagnostics.append(Diagnostic(
                "DimensionMismatch",
                f"{len(unit.data_weights)} data weights for dimension {net.dimension}", i,
            ))
        if i == 0 and unit.bit_weight is not None:
            diagnostics.append(Diagnostic("FirstUnitHasBit", f"first unit has bit weight {unit.bit_weight}", i))
        if i > 0 and unit.bit_weight is None:
            diagnostics.append(Diagnostic("MissingBitWeight", "only the first unit may read no bit", i))

        if unit.kind is UnitKind.CUT:
            if i > 0 and unit.bit_weight is not None and unit.bit_weight != net.saturation:
                diagnostics.append(Diagnostic(
                    "BadBitWeight", f"cut bit weight {unit.bit_weight} != saturation {net.saturation}", i,
                ))
            norm = math.hypot(*unit.data_weights)
            if norm > norm_limit * (1.0 + _NORM_SLACK):
                diagnostics.append(Diagnostic(
                    "ScaledNormExceeded", f"weight norm {norm!r} exceeds 1/(2B) = {norm_limit!r}", i,
                ))
        else:
            expected = Unit.inverter(net.dimension)
            if unit.data_weights != expected.data_weights or unit.bit_weight != INVERTER_BIT_WEIGHT:
                diagnostics.append(Diagnostic(
                    "MalformedInverter", f"inverter weights {unit.data_weights}, bit {unit.bit_weight}", i,
                ))

    if net.units[-1].kind is not UnitKind.INVERTER:
        diagnostics.append(Diagnostic("MissingTerminalInverter", "last unit is not an inverter", len(net.units) - 1))

    if net.hulls is not None:
        expected_units = sum(len(h.cuts) + 1 for h in net.hulls)
        if expected_units != len(net.units):
            diagnostics.append(Diagnostic(
                "UnitCountMismatch", f"{len(net.units)} units, hulls imply {expected_units}",
            ))
    return diagnostics


def summarize(net: ChainNetwork) -> NetworkSummary:
    if net.hulls:
        facets = tuple(len(h.cuts) for h in net.hulls)
        classes = tuple(h.generator_class for h in net.hulls)
    else:
        # innermost module first in the chain, R1 first in the summary
        facets = tuple(len(span) - 1 for span in reversed(net.module_spans()))
        classes = tuple(
            net.positive_class if k % 2 == 0 else net.negative_class for k in range(len(facets))
        )
    return NetworkSummary(
        dimension=net.dimension,
        domain_bound=net.domain_bound,
        region_count=len(facets),
        unit_count=len(net.units),
        facet_counts=facets,
        generator_classes=classes,
        positive_class=net.positive_class,
    )
