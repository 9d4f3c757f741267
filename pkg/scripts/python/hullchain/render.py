"""Static SVG of a planar chain network's decision region.

Layers, bottom to top: a resolution x resolution raster of forward-pass
labels at cell centers, one outline per nesting level, the training points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .evaluator import classify_batch, in_domain
from .geometry import BoundingBox, ClassLabel, Polytope
from .network import ChainNetwork, compile_network, default_bound
from .peeling import Dataset

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
CANVAS = 512

CELL_FILL = {ClassLabel.POS: "#c6dbef", ClassLabel.NEG: "#fee6a6", None: "#d9d9d9"}
POINT_FILL = {ClassLabel.POS: "#08519c", ClassLabel.NEG: "#d94801"}
OUTLINE_STROKE = {ClassLabel.POS: "#08306b", ClassLabel.NEG: "#7f2704"}


def _num(x: float, prec: int = 3) -> str:
    text = f"{x:.{prec}f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


@dataclass(frozen=True)
class RasterCell:
    row: int
    col: int
    center: tuple[float, float]
    # None when the cell center lies outside the network's domain bound
    label: ClassLabel | None


def grid_centers(box: BoundingBox, resolution: int) -> np.ndarray:
    """Cell centers row-major from the top row, shape (resolution**2, 2)."""
    (x0, y0), (x1, y1) = box.lower, box.upper
    dx, dy = (x1 - x0) / resolution, (y1 - y0) / resolution
    cols = x0 + (np.arange(resolution) + 0.5) * dx
    rows = y1 - (np.arange(resolution) + 0.5) * dy
    xx, yy = np.meshgrid(cols, rows)
    return np.column_stack([xx.ravel(), yy.ravel()])


def raster_cells(net: ChainNetwork, box: BoundingBox, resolution: int, workers: int = 1) -> list[RasterCell]:
    centers = grid_centers(box, resolution)
    mask = in_domain(net, centers)
    labels = iter(classify_batch(net, centers[mask], workers=workers))
    cells = []
    for idx, (center, inside) in enumerate(zip(centers.tolist(), mask.tolist())):
        row, col = divmod(idx, resolution)
        cells.append(RasterCell(row, col, tuple(center), next(labels) if inside else None))
    return cells


def render_box(net: ChainNetwork, dataset: Dataset | None = None) -> BoundingBox:
    points = [v for hull in (net.hulls or ()) for v in hull.vertices]
    if dataset is not None:
        points.extend(p.coords for p in dataset.points)
    if not points:
        bound = net.domain_bound / 2.0
        return BoundingBox((-bound, -bound), (bound, bound))
    return BoundingBox.around(points).padded()


def render_svg(
    source: ChainNetwork | Sequence[Polytope],
    dataset: Dataset | None = None,
    resolution: int = 64,
    workers: int = 1,
) -> str:
    """SVG text for a network (or a hull sequence, compiled on the fly)."""
    if resolution < 1:
        raise ValueError(f"resolution must be positive, got {resolution}")
    hulls = None if isinstance(source, ChainNetwork) else tuple(source)
    dimension = source.dimension if hulls is None else (hulls[0].dimension if hulls else 0)
    if dimension != 2 or (dataset is not None and dataset.dimension != 2):
        raise DimensionError("rendering needs planar (n = 2) networks and datasets")

    if hulls is None:
        net = source
    else:
        extent = [v for h in hulls for v in h.vertices]
        if dataset is not None:
            extent.extend(p.coords for p in dataset.points)
        padded = BoundingBox.around(extent).padded()
        (lx, ly), (ux, uy) = padded.lower, padded.upper
        net = compile_network(hulls, default_bound([(lx, ly), (lx, uy), (ux, ly), (ux, uy)]))

    box = render_box(net, dataset)
    (x0, y0), (x1, y1) = box.lower, box.upper
    sx, sy = CANVAS / (x1 - x0), CANVAS / (y1 - y0)

    def px(p: Sequence[float]) -> str:
        return f"{_num((p[0] - x0) * sx)},{_num((y1 - p[1]) * sy)}"

    cells = raster_cells(net, box, resolution, workers=workers)
    cw, ch = CANVAS / resolution, CANVAS / resolution
    lines = [
        f'<svg xmlns="{SVG_NS}" version="1.1" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        '<g id="raster" shape-rendering="crispEdges">',
    ]
    for cell in cells:
        kind = str(cell.label) if cell.label is not None else "out"
        lines.append(
            f'<rect class="cell {kind}" x="{_num(cell.col * cw)}" y="{_num(cell.row * ch)}" '
            f'width="{_num(cw)}" height="{_num(ch)}" fill="{CELL_FILL[cell.label]}"/>'
        )
    lines.append("</g>")

    lines.append('<g id="hulls" fill="none" stroke-width="1.5">')
    for hull in net.hulls or ():
        points = " ".join(px(v) for v in hull.vertices)
        lines.append(
            f'<polygon class="hull level-{hull.level} {hull.generator_class}" points="{points}" '
            f'stroke="{OUTLINE_STROKE[hull.generator_class]}"/>'
        )
    lines.append("</g>")

    lines.append('<g id="points">')
    for p in dataset.points if dataset is not None else ():
        cx, cy = px(p.coords).split(",")
        lines.append(f'<circle class="point {p.label}" cx="{cx}" cy="{cy}" r="3" fill="{POINT_FILL[p.label]}"/>')
    lines.append("</g>")
    lines.append("</svg>")

    logger.debug("rendered %d cells, %d outlines", len(cells), len(net.hulls or ()))
    return "\n".join(lines) + "\n"
