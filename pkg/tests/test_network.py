"""
Unit tests for hullchain.network.

Tests cover:
- Cut scaling against the domain bound
- Polytope modules and whole-chain compilation
- Hull sequence precondition checks
- validate() diagnostics on tampered networks
- Network summaries
"""

import math
import sys
from dataclasses import replace
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts" / "python"))

from hullchain.errors import InvalidBound, NotAlternating, NotNested, ZeroWeight
from hullchain.geometry import ClassLabel, Cut, hull_polytope
from hullchain.network import (
    INVERTER_BIAS,
    SATURATION,
    ChainNetwork,
    Unit,
    UnitKind,
    check_hull_sequence,
    compile_network,
    compile_polytope_module,
    default_bound,
    lifted_norm,
    scale_cut,
    summarize,
    validate,
)
from hullchain.peeling import peel


def codes(net):
    return {d.code for d in validate(net)}


def with_unit(net, index, unit):
    units = list(net.units)
    units[index] = unit
    return replace(net, units=tuple(units))


class TestScaleCut:
    """Tests for scale_cut()."""

    def test_unit_normal(self):
        assert scale_cut(Cut((0.0, -1.0, 0.0)), 2.0).weights == (0.0, -0.25, 0.0)

    def test_scaled_norm_is_half_over_bound(self):
        scaled = scale_cut(Cut((1.0, 1.0, -1.0)), 3.0)

        assert math.hypot(*scaled.weights) == pytest.approx(1 / 6)

    def test_keeps_degenerate_flag(self):
        assert scale_cut(Cut((1.0, 0.0, -2.0), degenerate_cap=True), 5.0).degenerate_cap

    def test_zero_normal_raises(self):
        with pytest.raises(ZeroWeight):
            scale_cut(Cut((0.0, 0.0, 1.0)), 2.0)

    @pytest.mark.parametrize("bound", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_bound_raises(self, bound):
        with pytest.raises(InvalidBound):
            scale_cut(Cut((1.0, 0.0, 0.0)), bound)


class TestDefaultBound:
    """Tests for lifted_norm() and default_bound()."""

    def test_lifted_norm(self):
        assert lifted_norm((2.0, 2.0)) == pytest.approx(3.0)

    def test_twice_the_widest_point(self):
        assert default_bound([(0, 0), (2, 2)]) == pytest.approx(6.0)

    def test_custom_factor(self):
        assert default_bound([(2, 2)], factor=10.0) == pytest.approx(30.0)

    def test_empty_raises(self):
        with pytest.raises(InvalidBound):
            default_bound([])


class TestCompilePolytopeModule:
    """Tests for compile_polytope_module()."""

    def test_triangle_gives_three_cuts_and_inverter(self, triangle_hull):
        units = compile_polytope_module(triangle_hull, 2.0, has_incoming_bit=False)

        assert [u.kind for u in units] == [UnitKind.CUT] * 3 + [UnitKind.INVERTER]
        assert units[0].bit_weight is None
        assert [u.bit_weight for u in units[1:3]] == [SATURATION, SATURATION]
        assert units[3].data_weights == (0.0, 0.0, INVERTER_BIAS)
        assert units[3].bit_weight == -1.0

    def test_incoming_bit_feeds_first_cut(self, triangle_hull):
        units = compile_polytope_module(triangle_hull, 2.0, has_incoming_bit=True)

        assert units[0].bit_weight == SATURATION


class TestCheckHullSequence:
    """Tests for check_hull_sequence()."""

    def test_peel_output_passes(self, nested_hulls):
        check_hull_sequence(nested_hulls)

    def test_empty_sequence_raises(self):
        with pytest.raises(NotNested):
            check_hull_sequence([])

    def test_same_class_twice_raises(self, triangle_hull):
        inner = hull_polytope([(0.2, 0.2)], ClassLabel.POS, 2)

        with pytest.raises(NotAlternating):
            check_hull_sequence([triangle_hull, inner])

    def test_wrong_level_raises(self, triangle_hull):
        inner = hull_polytope([(0.2, 0.2)], ClassLabel.NEG, 3)

        with pytest.raises(NotAlternating):
            check_hull_sequence([triangle_hull, inner])

    def test_inner_outside_outer_raises(self, triangle_hull):
        inner = hull_polytope([(5, 5)], ClassLabel.NEG, 2)

        with pytest.raises(NotNested):
            check_hull_sequence([triangle_hull, inner])


class TestCompileNetwork:
    """Tests for compile_network()."""

    def test_single_triangle(self, triangle_net):
        assert len(triangle_net.units) == 4
        assert triangle_net.positive_class is ClassLabel.POS
        assert triangle_net.domain_bound == 2.0

    def test_two_nested_triangles(self):
        outer = hull_polytope([(0, 0), (4, 0), (0, 4)], ClassLabel.POS, 1)
        inner = hull_polytope([(0.5, 0.5), (2, 0.5), (0.5, 2)], ClassLabel.NEG, 2)

        net = compile_network([outer, inner], 10.0)

        assert len(net.units) == 8
        assert validate(net) == []

    def test_nested_squares(self, nested_net):
        assert len(nested_net.units) == 15
        assert [len(span) for span in nested_net.module_spans()] == [5, 5, 5]
        assert validate(nested_net) == []

    def test_innermost_module_first(self, nested_net):
        first = nested_net.units[0]

        assert first.bit_weight is None
        # R3 is the point (2, 2): its first cap is x1 - 2 > 0
        assert first.data_weights[0] > 0
        assert first.data_weights[1] == 0.0

    def test_bound_below_hull_extent_raises(self, nested_hulls):
        with pytest.raises(InvalidBound):
            compile_network(nested_hulls, 1.0)

    def test_negative_positive_class(self, nested_squares):
        hulls = peel(nested_squares.with_positive_class(ClassLabel.NEG))
        net = compile_network(hulls, 20.0)

        assert net.positive_class is ClassLabel.NEG
        assert net.negative_class is ClassLabel.POS


class TestValidate:
    """Tests for validate() diagnostics."""

    def test_clean_network(self, triangle_net):
        assert validate(triangle_net) == []

    def test_empty_network(self):
        net = ChainNetwork(2, 1.0, (), ClassLabel.POS)

        assert codes(net) == {"EmptyNetwork"}

    def test_first_unit_with_bit(self, triangle_net):
        net = with_unit(triangle_net, 0, replace(triangle_net.units[0], bit_weight=SATURATION))

        assert "FirstUnitHasBit" in codes(net)

    def test_missing_bit_weight(self, triangle_net):
        net = with_unit(triangle_net, 1, replace(triangle_net.units[1], bit_weight=None))

        assert "MissingBitWeight" in codes(net)

    def test_bad_bit_weight(self, triangle_net):
        net = with_unit(triangle_net, 1, replace(triangle_net.units[1], bit_weight=1.0))

        assert "BadBitWeight" in codes(net)

    def test_malformed_inverter(self, triangle_net):
        net = with_unit(triangle_net, 3, Unit(UnitKind.INVERTER, (0.0, 0.0, 0.4), -1.0))

        assert "MalformedInverter" in codes(net)

    def test_missing_terminal_inverter(self, triangle_net):
        net = with_unit(triangle_net, 3, replace(triangle_net.units[2]))

        assert codes(net) == {"MissingTerminalInverter"}

    def test_scaled_norm_exceeded(self, triangle_net):
        doubled = tuple(2 * w for w in triangle_net.units[1].data_weights)
        net = with_unit(triangle_net, 1, replace(triangle_net.units[1], data_weights=doubled))

        assert codes(net) == {"ScaledNormExceeded"}

    def test_dimension_mismatch(self, triangle_net):
        net = with_unit(triangle_net, 1, replace(triangle_net.units[1], data_weights=(0.1, 0.1)))

        assert "DimensionMismatch" in codes(net)

    def test_weak_saturation(self, triangle_net):
        assert "WeakSaturation" in codes(replace(triangle_net, saturation=0.5))

    def test_unit_count_mismatch(self, triangle_net, nested_hulls):
        assert codes(replace(triangle_net, hulls=tuple(nested_hulls))) == {"UnitCountMismatch"}

    def test_network_without_hulls_still_validates(self, nested_net):
        assert validate(replace(nested_net, hulls=None)) == []


class TestSummarize:
    """Tests for summarize()."""

    def test_nested_squares(self, nested_net):
        summary = summarize(nested_net)

        assert summary.region_count == 3
        assert summary.unit_count == 15
        assert summary.facet_counts == (4, 4, 4)
        assert summary.generator_classes == (ClassLabel.POS, ClassLabel.NEG, ClassLabel.POS)

    def test_from_units_alone(self, nested_net):
        assert summarize(replace(nested_net, hulls=None)) == summarize(nested_net)
