"""Bit-exact JSON serialization of ChainNetwork (format version 1).

Floats are written with ``repr`` semantics (shortest round-trip decimal), so
``load_network(save_network(net))`` reproduces every weight exactly. Schema
checks live here; semantic checks belong to ``network.validate``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .errors import HullChainError, SchemaError, VersionError
from .geometry import ClassLabel, Cut, Polytope
from .network import ChainNetwork, Unit, UnitKind

FORMAT_VERSION = 1

_TOP_LEVEL_FIELDS = {
    "format_version", "dimension", "domain_bound", "saturation", "positive_class", "units", "hulls",
}
_UNIT_FIELDS = {"kind", "data_weights", "bit_weight"}
_HULL_FIELDS = {"generator_class", "vertices", "cuts", "degenerate"}


def network_to_dict(net: ChainNetwork) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "dimension": net.dimension,
        "domain_bound": net.domain_bound,
        "saturation": net.saturation,
        "positive_class": str(net.positive_class),
        "units": [
            {
                "kind": str(unit.kind),
                "data_weights": list(unit.data_weights),
                "bit_weight": unit.bit_weight,
            }
            for unit in net.units
        ],
        "hulls": None,
    }
    if net.hulls is not None:
        doc["hulls"] = [
            {
                "generator_class": str(hull.generator_class),
                "vertices": [list(v) for v in hull.vertices],
                "cuts": [list(c.weights) for c in hull.cuts],
                "degenerate": hull.is_degenerate,
            }
            for hull in net.hulls
        ]
    return doc


def dumps(net: ChainNetwork) -> str:
    return json.dumps(network_to_dict(net), indent=2, allow_nan=False)


def save_network(net: ChainNetwork, path: str | Path) -> None:
    Path(path).write_text(dumps(net) + "\n", encoding="utf-8")


def _require(doc: dict, key: str, path: str) -> Any:
    if key not in doc:
        raise SchemaError("missing field", path=f"{path}.{key}" if path else key)
    return doc[key]


def _object(value: Any, path: str, fields: set[str]) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {type(value).__name__}", path=path or "<root>")
    unknown = sorted(set(value) - fields)
    if unknown:
        raise SchemaError(f"unknown field(s) {unknown}", path=path or "<root>")
    return value


def _real(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", path=path)
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(f"expected a finite number, got {value!r}", path=path)
    return value


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected an integer, got {value!r}", path=path)
    return value


def _vector(value: Any, path: str, length: int | None = None) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, got {type(value).__name__}", path=path)
    if length is not None and len(value) != length:
        raise SchemaError(f"expected {length} entries, got {len(value)}", path=path)
    return tuple(_real(v, f"{path}[{i}]") for i, v in enumerate(value))


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, got {type(value).__name__}", path=path)
    return value


def _label(value: Any, path: str) -> ClassLabel:
    try:
        return ClassLabel(value)
    except ValueError as exc:
        raise SchemaError(f"expected 'pos' or 'neg', got {value!r}", path=path) from exc


def _unit(doc: Any, path: str, dimension: int) -> Unit:
    doc = _object(doc, path, _UNIT_FIELDS)
    kind = _require(doc, "kind", path)
    if kind not in ("cut", "inverter"):
        raise SchemaError(f"expected 'cut' or 'inverter', got {kind!r}", path=f"{path}.kind")
    weights = _vector(_require(doc, "data_weights", path), f"{path}.data_weights", dimension + 1)
    bit_weight = _require(doc, "bit_weight", path)
    if bit_weight is not None:
        bit_weight = _real(bit_weight, f"{path}.bit_weight")
    return Unit(UnitKind(kind), weights, bit_weight)


def _hull(doc: Any, path: str, dimension: int, level: int) -> Polytope:
    doc = _object(doc, path, _HULL_FIELDS)
    generator = _label(_require(doc, "generator_class", path), f"{path}.generator_class")
    vertices = [
        _vector(v, f"{path}.vertices[{i}]", dimension)
        for i, v in enumerate(_list(_require(doc, "vertices", path), f"{path}.vertices"))
    ]
    degenerate = doc.get("degenerate", False)
    if not isinstance(degenerate, bool):
        raise SchemaError(f"expected a boolean, got {degenerate!r}", path=f"{path}.degenerate")
    cuts = [
        Cut(_vector(c, f"{path}.cuts[{i}]", dimension + 1), degenerate_cap=degenerate)
        for i, c in enumerate(_list(_require(doc, "cuts", path), f"{path}.cuts"))
    ]
    try:
        return Polytope(tuple(vertices), tuple(cuts), generator, level)
    except HullChainError as exc:
        raise SchemaError(exc.detail, path=path) from exc


def network_from_dict(doc: Any) -> ChainNetwork:
    doc = _object(doc, "", _TOP_LEVEL_FIELDS)
    version = _require(doc, "format_version", "")
    if version != FORMAT_VERSION or isinstance(version, bool):
        raise VersionError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")

    dimension = _integer(_require(doc, "dimension", ""), "dimension")
    if dimension < 1:
        raise SchemaError(f"expected a positive dimension, got {dimension}", path="dimension")
    units = [
        _unit(u, f"units[{i}]", dimension)
        for i, u in enumerate(_list(_require(doc, "units", ""), "units"))
    ]
    if not units:
        raise SchemaError("expected at least one unit", path="units")
    hulls_doc = doc.get("hulls")
    hulls = None
    if hulls_doc is not None:
        hulls = tuple(
            _hull(h, f"hulls[{i}]", dimension, i + 1)
            for i, h in enumerate(_list(hulls_doc, "hulls"))
        )

    return ChainNetwork(
        dimension=dimension,
        domain_bound=_real(_require(doc, "domain_bound", ""), "domain_bound"),
        units=tuple(units),
        positive_class=_label(_require(doc, "positive_class", ""), "positive_class"),
        saturation=_real(_require(doc, "saturation", ""), "saturation"),
        hulls=hulls,
    )


def loads(text: str) -> ChainNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON ({exc.msg} at line {exc.lineno})", path="<root>") from exc
    return network_from_dict(doc)


def load_network(path: str | Path) -> ChainNetwork:
    return loads(Path(path).read_text(encoding="utf-8"))
