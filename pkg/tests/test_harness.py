"""
Unit tests for hullchain.harness.

Tests cover:
- The dedup -> peel -> compile -> validate pipeline
- Differential verification against the oracle (reproducibility, skips)
- Peel sanity checks and training consistency
- Small fuzz campaigns
- The DuckDB run ledger
"""

import sys
from dataclasses import replace
from pathlib import Path

import duckdb
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts" / "python"))

import hullchain.harness as harness
from hullchain.errors import EmptyInput, MissingHulls
from hullchain.geometry import ClassLabel, LabeledPoint, hull_polytope, nearest_cut_distance
from hullchain.harness import (
    CompileOptions,
    VerifyConfig,
    build_network,
    create_run_json_blob,
    nearest_cut_distances,
    peel_problems,
    report_payload,
    run_fuzz_campaign,
    store_run_json,
    training_errors,
    verify_network,
)
from hullchain.peeling import Dataset


def small_config(**overrides):
    return VerifyConfig.get_config(**{"samples": 3000, "epsilon": 1e-6, "seed": 42, "workers": 1, **overrides})


class TestBuildNetwork:
    """Tests for build_network()."""

    def test_nested_squares(self, nested_squares):
        built = build_network(nested_squares)

        assert len(built.hulls) == 3
        assert len(built.network.units) == 15
        assert built.diagnostics == []

    def test_conflicting_points_are_dropped(self, nested_squares):
        noisy = Dataset(nested_squares.points + (LabeledPoint((2, 2), "neg"),), 2)

        built = build_network(noisy)

        assert (2.0, 2.0) not in [p.coords for p in built.dataset.points]
        assert len(built.hulls) == 2

    def test_explicit_bound_and_positive_class(self, nested_squares):
        built = build_network(nested_squares, CompileOptions(positive_class=ClassLabel.NEG, bound=20.0))

        assert built.network.domain_bound == 20.0
        assert built.network.positive_class is ClassLabel.NEG

    def test_training_points_reproduced(self, nested_squares):
        built = build_network(nested_squares)

        assert training_errors(built.network, built.dataset) == []


class TestVerifyNetwork:
    """Tests for verify_network()."""

    def test_nested_squares_agree(self, nested_net):
        report = verify_network(nested_net, small_config())

        assert report.passed
        assert report.samples == 3000
        assert report.agreements == report.retained
        assert report.out_of_domain == 0
        assert report.summary_line() == f"agreement: {report.retained}/{report.retained}"

    def test_fixed_seed_is_reproducible(self, triangle_net):
        assert verify_network(triangle_net, small_config()) == verify_network(triangle_net, small_config())

    def test_parallel_matches_serial(self, nested_net):
        serial = verify_network(nested_net, small_config(samples=10000))
        parallel = verify_network(nested_net, small_config(samples=10000, workers=4))

        assert parallel == serial

    def test_wide_epsilon_skips_samples(self, nested_net):
        report = verify_network(nested_net, small_config(epsilon=0.5))

        assert report.near_cut > 0
        assert report.retained + report.near_cut + report.out_of_domain == report.samples

    def test_tampered_network_reports_mismatches(self, nested_net):
        # drop the inner two modules: the chain now recognises R1 alone
        units = nested_net.units[10:]
        first = replace(units[0], bit_weight=None)
        broken = replace(nested_net, units=(first,) + units[1:])

        report = verify_network(broken, small_config())

        assert not report.passed
        assert report.mismatch_count > 0
        assert len(report.mismatches) <= harness.MAX_REPORTED_MISMATCHES

    def test_run_without_retained_samples_fails(self, nested_net):
        report = verify_network(nested_net, small_config(epsilon=1e6))

        assert report.retained == 0
        assert report.near_cut == report.samples
        assert not report.passed

    def test_zero_samples_rejected(self, nested_net):
        with pytest.raises(EmptyInput):
            verify_network(nested_net, small_config(samples=0))

    def test_network_without_hulls_raises(self, nested_net):
        with pytest.raises(MissingHulls):
            verify_network(replace(nested_net, hulls=None), small_config())


class TestHelpers:
    """Tests for nearest_cut_distances(), peel_problems() and VerifyConfig."""

    def test_vectorised_distances_match_scalar(self, nested_hulls):
        points = np.random.default_rng(4).uniform(-1, 5, size=(200, 2))

        expected = [nearest_cut_distance(nested_hulls, x) for x in points.tolist()]

        np.testing.assert_allclose(nearest_cut_distances(nested_hulls, points), expected, rtol=1e-12)

    def test_clean_peel_has_no_problems(self, nested_hulls):
        assert peel_problems(nested_hulls, 9) == []

    def test_outer_vertex_inside_inner_is_reported(self):
        outer = hull_polytope([(0, 0), (1, 0), (0, 1)], ClassLabel.POS, 1)
        inner = hull_polytope([(0, 0), (0.5, 0), (0, 0.5)], ClassLabel.NEG, 2)

        problems = peel_problems([outer, inner], 6)

        assert len(problems) == 1
        assert "inside R2" in problems[0]

    def test_config_defaults_from_environment_constants(self):
        config = VerifyConfig.get_config()

        assert config.samples == harness.DEFAULT_SAMPLES
        assert config.epsilon == harness.DEFAULT_EPSILON
        assert config.seed == harness.DEFAULT_SEED
        assert config.padding == 0.1


class TestFuzzCampaign:
    """Tests for run_fuzz_campaign()."""

    def test_small_campaign_passes(self):
        seen = []

        outcomes = run_fuzz_campaign(
            datasets=3, max_points_per_class=30, samples=2000, seed=11, on_outcome=seen.append,
        )

        assert len(outcomes) == 3
        assert seen == outcomes
        assert all(o.passed for o in outcomes), [o.summary_line() for o in outcomes]

    def test_campaign_is_reproducible(self):
        first = run_fuzz_campaign(datasets=2, max_points_per_class=20, samples=500, seed=5)
        second = run_fuzz_campaign(datasets=2, max_points_per_class=20, samples=500, seed=5)

        assert [o.summary_line() for o in first] == [o.summary_line() for o in second]

    def test_outcomes_carry_the_generated_dataset(self):
        outcomes = run_fuzz_campaign(datasets=2, max_points_per_class=20, samples=500, seed=5)

        assert all(o.dataset is not None and len(o.dataset.points) >= o.points for o in outcomes)


class TestRunLedger:
    """Tests for create_run_json_blob() and store_run_json()."""

    def test_blob_shape(self, triangle_net):
        report = verify_network(triangle_net, small_config(samples=100))

        blob = create_run_json_blob('verify', report_payload(report))

        assert blob["run_kind"] == "verify"
        assert blob["source"] == "cli"
        assert blob["result"]["passed"] is True
        assert "generated_at" in blob

    def test_store_creates_table_and_directory(self, tmp_path):
        db_path = tmp_path / "nested" / "runs.duckdb"

        store_run_json(create_run_json_blob('fuzz', {"datasets": 1}), str(db_path))
        store_run_json(create_run_json_blob('verify', {"passed": True}), str(db_path))

        with duckdb.connect(str(db_path)) as conn:
            rows = conn.execute(
                "SELECT run_json->>'run_kind' FROM raw_verification_runs ORDER BY loaded_at"
            ).fetchall()
        assert sorted(r[0] for r in rows) == ["fuzz", "verify"]
