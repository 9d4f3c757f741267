"""Forward pass through a ChainNetwork.

One bit travels between units as an exact 0/1 value; every unit also sees the
lifted input. ``forward_batch`` performs the same floating-point operations in
the same order as ``forward``, column-wise, so both agree bit for bit.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainBoundExceeded, EmptyInput
from .geometry import TOLERANCE, ClassLabel, as_point, dot_lifted, lift
from .network import ChainNetwork, Unit, UnitKind, lifted_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalTrace:
    bits: tuple[int, ...]
    # per module (chain order): index of its first CUT unit that fired, if any
    fired_units: tuple[int | None, ...]
    label: ClassLabel

    def format_bits(self) -> str:
        return " ".join(str(b) for b in self.bits)


def unit_step(u: Unit, lifted: Sequence[float], b: int) -> int:
    """1 iff data_weights . x~ (+ bit_weight * b) exceeds the tolerance."""
    if len(lifted) != len(u.data_weights):
        raise DimensionError(f"unit expects {len(u.data_weights)} lifted inputs, got {len(lifted)}")
    if lifted[-1] != 1.0:
        raise DimensionError(f"lifted input must end in 1, got {lifted[-1]}")
    value = dot_lifted(u.data_weights, lifted)
    if u.bit_weight is not None:
        value = value + u.bit_weight * b
    return 1 if value > TOLERANCE else 0


def _require_units(net: ChainNetwork) -> None:
    if not net.units:
        raise EmptyInput("network has no units")


def _lift_in_domain(net: ChainNetwork, x: Sequence[float]) -> tuple[float, ...]:
    coords = as_point(x, net.dimension)
    norm = lifted_norm(coords)
    if norm > net.domain_bound:
        raise DomainBoundExceeded(f"||x~|| = {norm!r} exceeds the domain bound {net.domain_bound!r}")
    return lift(coords)


def decode(net: ChainNetwork, last_bit: int) -> ClassLabel:
    return net.positive_class if last_bit == 1 else net.negative_class


def forward(net: ChainNetwork, x: Sequence[float]) -> EvalTrace:
    _require_units(net)
    lifted = _lift_in_domain(net, x)
    bits: list[int] = []
    b = 0
    for unit in net.units:
        b = unit_step(unit, lifted, b)
        bits.append(b)

    fired = []
    for span in net.module_spans():
        fired.append(next(
            (i for i in span if net.units[i].kind is UnitKind.CUT and bits[i] == 1), None
        ))
    return EvalTrace(tuple(bits), tuple(fired), decode(net, bits[-1]))


def in_domain(net: ChainNetwork, points: np.ndarray) -> np.ndarray:
    """Boolean mask of rows with ||x~|| <= B, using the scalar norm."""
    return np.fromiter(
        (lifted_norm(row) <= net.domain_bound for row in points.tolist()),
        dtype=bool, count=len(points),
    )


def _as_matrix(net: ChainNetwork, points) -> np.ndarray:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.dimension:
        raise DimensionError(f"expected an (N, {net.dimension}) array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DimensionError("points must be finite")
    return X


def forward_batch(net: ChainNetwork, points) -> np.ndarray:
    """Bit matrix of shape (N, unit count), identical row by row to ``forward``."""
    _require_units(net)
    X = _as_matrix(net, points)
    if len(X) and not in_domain(net, X).all():
        raise DomainBoundExceeded(f"some points exceed the domain bound {net.domain_bound!r}")

    columns = [X[:, j] for j in range(net.dimension)] + [1.0]
    bits = np.zeros((len(X), len(net.units)), dtype=np.uint8)
    prev = np.zeros(len(X), dtype=np.float64)
    for i, unit in enumerate(net.units):
        value = dot_lifted(unit.data_weights, columns)
        if unit.bit_weight is not None:
            value = value + unit.bit_weight * prev
        bits[:, i] = value > TOLERANCE
        prev = bits[:, i].astype(np.float64)
    return bits


def classify_batch(net: ChainNetwork, points, workers: int = 1, chunk_size: int = 8192) -> list[ClassLabel]:
    """Labels for many points, split into chunks across a thread pool; input order is kept."""
    X = _as_matrix(net, points)
    chunks = [X[i:i + chunk_size] for i in range(0, len(X), chunk_size)]
    if workers <= 1 or len(chunks) <= 1:
        results = [forward_batch(net, chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda chunk: forward_batch(net, chunk), chunks))
    logger.debug("classified %d points in %d chunks", len(X), len(chunks))
    return [decode(net, int(bit)) for result in results for bit in result[:, -1]]
