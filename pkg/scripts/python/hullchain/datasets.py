"""CSV ingestion and label output, plus random datasets for fuzzing.

Dataset files are UTF-8 CSV with a header ``x1,...,xn,label``; labels are
``pos``/``neg`` (any case) or ``1``/``0``.
"""

from __future__ import annotations

import contextlib
import csv
import math
import re
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyFile, ParseError, RaggedRow, UnknownLabel
from .geometry import ClassLabel, LabeledPoint
from .peeling import Dataset

_FEATURE_RE = re.compile(r"^x(\d+)$")
_LABELS = {
    "pos": ClassLabel.POS,
    "1": ClassLabel.POS,
    "neg": ClassLabel.NEG,
    "0": ClassLabel.NEG,
}

Source = str | Path | IO[str]


def _decoded_lines(handle: IO[bytes]) -> Iterator[str]:
    for number, raw in enumerate(handle, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8 byte 0x{raw[exc.start]:02x} at column {exc.start + 1}", line=number) from exc


@contextlib.contextmanager
def _open_text(source: Source) -> Iterator[Iterable[str]]:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            yield _decoded_lines(handle)
    else:
        yield source


def _feature_count(header: list[str]) -> int:
    """Number of leading ``x1..xn`` columns; raises on anything else."""
    names = [h.strip().lower() for h in header]
    n = 0
    for name in names:
        match = _FEATURE_RE.match(name)
        if not match:
            break
        n += 1
        if int(match.group(1)) != n:
            raise ParseError(f"expected column x{n}, found '{name}'", line=1)
    if n == 0:
        raise ParseError(f"header must start with x1, found '{header[0].strip()}'", line=1)
    return n


def _parse_coords(cells: Sequence[str], line: int) -> tuple[float, ...]:
    try:
        coords = tuple(float(c) for c in cells)
    except ValueError as exc:
        raise ParseError(f"non-numeric coordinate in {list(cells)}", line=line) from exc
    if not all(math.isfinite(v) for v in coords):
        raise ParseError(f"non-finite coordinate in {list(cells)}", line=line)
    return coords


def _rows(handle: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(handle)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        yield reader.line_num, row


def load_dataset(source: Source) -> Dataset:
    """Read a labeled CSV; dimension comes from the header, positive class is POS."""
    with _open_text(source) as handle:
        rows = _rows(handle)
        header = next(rows, None)
        if header is None:
            raise EmptyFile("dataset file is empty")
        _, names = header
        n = _feature_count(names)
        if len(names) != n + 1 or names[-1].strip().lower() != "label":
            raise ParseError("header must be x1,...,xn,label", line=1)

        points = []
        for line, row in rows:
            if len(row) != n + 1:
                raise RaggedRow(f"expected {n + 1} fields, got {len(row)}", line=line)
            coords = _parse_coords(row[:n], line)
            tag = row[n].strip().lower()
            if tag not in _LABELS:
                raise UnknownLabel(f"unknown label '{row[n].strip()}'", line=line)
            points.append(LabeledPoint(coords, _LABELS[tag]))

    if not points:
        raise EmptyFile("dataset file has a header but no rows")
    return Dataset(tuple(points), n, ClassLabel.POS)


def load_points(source: Source) -> np.ndarray:
    """Read query points from a CSV whose header starts ``x1,...,xn``; extra columns are ignored."""
    with _open_text(source) as handle:
        rows = _rows(handle)
        header = next(rows, None)
        if header is None:
            raise EmptyFile("points file is empty")
        _, names = header
        n = _feature_count(names)
        points = []
        for line, row in rows:
            if len(row) != len(names):
                raise RaggedRow(f"expected {len(names)} fields, got {len(row)}", line=line)
            points.append(_parse_coords(row[:n], line))
    return np.asarray(points, dtype=np.float64).reshape(len(points), n)


def write_labels(path: str | Path, points: np.ndarray, labels: Sequence[ClassLabel]) -> None:
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[1] if points.ndim == 2 else 0
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(1, n + 1)] + ["label"])
        for row, label in zip(points.tolist(), labels):
            writer.writerow([repr(v) for v in row] + [str(label)])


def write_dataset(path: str | Path, d: Dataset) -> None:
    """Write ``d`` in the layout ``load_dataset`` reads back exactly."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(1, d.dimension + 1)] + ["label"])
        for p in d.points:
            writer.writerow([repr(v) for v in p.coords] + [str(p.label)])


def random_dataset(
    rng: np.random.Generator,
    max_points_per_class: int = 200,
    duplicate_rate: float = 0.01,
) -> Dataset:
    """Uniform points in [0,1]^2, up to ``max_points_per_class`` per class.

    About ``duplicate_rate`` of the points are copied with the opposite label
    to exercise cross-class duplicate removal.
    """
    points: list[LabeledPoint] = []
    for label in ClassLabel:
        count = int(rng.integers(1, max_points_per_class + 1))
        points.extend(LabeledPoint(tuple(xy), label) for xy in rng.random((count, 2)).tolist())

    injected = int(rng.binomial(len(points), duplicate_rate)) if duplicate_rate > 0 else 0
    for idx in rng.choice(len(points), size=min(injected, len(points)), replace=False).tolist():
        source = points[idx]
        points.append(LabeledPoint(source.coords, source.label.opposite))
    return Dataset(tuple(points), 2, ClassLabel.POS)
