"""
Unit tests for hullchain.serialization.

Tests cover:
- The JSON document layout of a compiled network
- Exact reload, including bit-identical traces
- Schema errors with field paths, and version checks
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts" / "python"))

from hullchain.errors import SchemaError, VersionError
from hullchain.evaluator import forward
from hullchain.serialization import (
    FORMAT_VERSION,
    dumps,
    load_network,
    loads,
    network_from_dict,
    network_to_dict,
    save_network,
)


def tampered(net, edit):
    doc = json.loads(dumps(net))
    edit(doc)
    return json.dumps(doc)


class TestDocument:
    """Tests for network_to_dict() and dumps()."""

    def test_triangle_document(self, triangle_net):
        doc = json.loads(dumps(triangle_net))

        assert doc["format_version"] == FORMAT_VERSION
        assert doc["dimension"] == 2
        assert doc["positive_class"] == "pos"
        assert len(doc["units"]) == 4
        assert doc["units"][0]["bit_weight"] is None
        assert doc["units"][3] == {"kind": "inverter", "data_weights": [0.0, 0.0, 0.5], "bit_weight": -1.0}

    def test_hulls_are_stored(self, nested_net):
        hulls = network_to_dict(nested_net)["hulls"]

        assert [h["generator_class"] for h in hulls] == ["pos", "neg", "pos"]
        assert [h["degenerate"] for h in hulls] == [False, False, True]
        assert hulls[2]["vertices"] == [[2.0, 2.0]]


class TestReload:
    """Tests for save_network() / load_network()."""

    def test_file_reload_is_exact(self, nested_net, tmp_path):
        path = tmp_path / "net.json"

        save_network(nested_net, path)

        assert load_network(path) == nested_net

    def test_traces_are_bit_identical(self, nested_net, tmp_path):
        path = tmp_path / "net.json"
        save_network(nested_net, path)
        reloaded = load_network(path)
        points = np.random.default_rng(8).uniform(-1, 5, size=(100, 2)).tolist()

        assert [forward(reloaded, x).bits for x in points] == [forward(nested_net, x).bits for x in points]

    def test_network_without_hulls(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc.update(hulls=None))

        assert loads(text).hulls is None


class TestSchemaErrors:
    """Tests for strict parsing."""

    def test_missing_field_path(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc["units"][0].pop("bit_weight"))

        with pytest.raises(SchemaError) as exc:
            loads(text)
        assert exc.value.path == "units[0].bit_weight"

    def test_wrong_weight_count(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc["units"][1]["data_weights"].pop())

        with pytest.raises(SchemaError) as exc:
            loads(text)
        assert exc.value.path == "units[1].data_weights"

    def test_unknown_field(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc.update(comment="hello"))

        with pytest.raises(SchemaError):
            loads(text)

    def test_boolean_is_not_a_number(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc.update(domain_bound=True))

        with pytest.raises(SchemaError) as exc:
            loads(text)
        assert exc.value.path == "domain_bound"

    def test_bad_unit_kind(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc["units"][2].update(kind="relu"))

        with pytest.raises(SchemaError) as exc:
            loads(text)
        assert exc.value.path == "units[2].kind"

    def test_bad_class_label(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc.update(positive_class="maybe"))

        with pytest.raises(SchemaError):
            loads(text)

    def test_empty_unit_list(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc.update(units=[]))

        with pytest.raises(SchemaError) as exc:
            loads(text)
        assert exc.value.path == "units"

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            loads("{not json")

    def test_not_an_object(self):
        with pytest.raises(SchemaError):
            network_from_dict([1, 2, 3])

    def test_unsupported_version(self, triangle_net):
        text = tampered(triangle_net, lambda doc: doc.update(format_version=2))

        with pytest.raises(VersionError):
            loads(text)
