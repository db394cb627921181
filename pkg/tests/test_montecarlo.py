import math

import pytest

from src.counting.exactcount import ClassKey, exact_p_simple
from src.models.degseq import Bipartition, DegreeSequence, moments, mu_parameters
from src.sampling.montecarlo import (
    Estimate,
    chunk_plan,
    estimate_class_conditional,
    estimate_defect_means,
    estimate_p_simple,
)
from src.utils.errors import InfeasibleError, InsufficientDataError
from src.utils.settings import Settings
from src.utils.validators import ValidationError


def small_chunks(**overrides) -> Settings:
    return Settings(chunk_trials=overrides.pop("chunk_trials", 700), **overrides)


class TestEstimate:
    def test_from_sums(self):
        # samples 0, 1, 1, 0
        estimate = Estimate.from_sums(2, 2, 4, seed=1)
        assert estimate.mean == 0.5
        assert estimate.stderr == pytest.approx(math.sqrt((1 / 3) / 4))

    def test_single_sample(self):
        assert Estimate.from_sums(3, 9, 1, seed=0).stderr == 0.0


class TestChunking:
    def test_plan_covers_trials(self):
        assert chunk_plan(12, 5) == [(0, 5), (1, 5), (2, 2)]

    def test_plan_rejects_zero(self):
        with pytest.raises(ValidationError):
            chunk_plan(0, 5)

    def test_same_seed_same_result(self):
        ds, bip = DegreeSequence.regular(30, 3), Bipartition.from_left(30, [0, 1, 2])
        first = estimate_p_simple(ds, bip, 3000, seed=42, settings=small_chunks())
        second = estimate_p_simple(ds, bip, 3000, seed=42, settings=small_chunks())
        assert first == second

    def test_independent_of_worker_count(self):
        ds, bip = DegreeSequence.regular(30, 3), Bipartition.empty(30)
        serial = estimate_defect_means(ds, bip, 2800, seed=5, settings=small_chunks(workers=1))
        parallel = estimate_defect_means(ds, bip, 2800, seed=5, settings=small_chunks(workers=2))
        assert serial.estimates == parallel.estimates


class TestPSimple:
    def test_converges_to_exact_value(self):
        ds, bip = DegreeSequence((2, 2, 1, 1, 1, 1)), Bipartition.from_left(6, [0])
        exact = float(exact_p_simple(ds, bip))
        estimate = estimate_p_simple(ds, bip, 20_000, seed=3, settings=small_chunks(chunk_trials=5000))
        assert abs(estimate.mean - exact) <= max(4 * estimate.stderr, 0.01)

    def test_prediction_attached(self):
        ds, bip = DegreeSequence.regular(20, 2), Bipartition.empty(20)
        estimate = estimate_p_simple(ds, bip, 100, seed=0)
        assert estimate.predicted == pytest.approx(math.exp(-float(mu_parameters(ds, bip).total)))

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            estimate_p_simple(DegreeSequence((3, 1, 1)), Bipartition.from_left(3, [0]), 10, seed=0)


class TestDefectMeans:
    def test_report_contents(self):
        ds, bip = DegreeSequence.regular(40, 3), Bipartition.from_left(40, range(5))
        report = estimate_defect_means(ds, bip, 2000, seed=8)
        assert set(report.estimates) == {"b0", "b1", "b2", "t1", "t2", "i_dl"}
        assert report.estimates["b1"].predicted == pytest.approx(float(mu_parameters(ds, bip).mu1))
        assert report.estimates["t1"].predicted is None
        assert report.scales["t"] == pytest.approx(81 / 120)
        assert report.exact_expectations["b0"] > 0


class TestClassConditional:
    def test_rare_class(self):
        ds, bip = DegreeSequence.regular(60, 3), Bipartition.empty(60)
        with pytest.raises(InsufficientDataError):
            estimate_class_conditional(ds, bip, ClassKey(9, 0, 0), 200, seed=1)

    def test_identities_hold_on_every_sample(self):
        ds, bip = DegreeSequence.regular(40, 3), Bipartition.from_left(40, range(6))
        report = estimate_class_conditional(ds, bip, ClassKey(), 3000, seed=4)
        assert report.identity_violations == 0
        assert report.hits > 2
        right = moments(ds, bip.right)
        assert report.a[1].mean + 2 * report.a[2].mean + report.a[3].mean == pytest.approx(right.m2)
        assert report.a[4].mean == pytest.approx(moments(ds, bip.left).m2)


@pytest.mark.slow
class TestAgainstFormulas:
    def test_regular_p_simple(self):
        ds, bip = DegreeSequence.regular(100, 3), Bipartition.empty(100)
        estimate = estimate_p_simple(ds, bip, 100_000, seed=7)
        assert abs(estimate.mean - math.exp(-2)) <= max(3 * estimate.stderr, 0.01)

    def test_bgraph_p_simple(self):
        ds, bip = DegreeSequence.regular(200, 4), Bipartition.from_left(200, range(50))
        estimate = estimate_p_simple(ds, bip, 100_000, seed=11)
        predicted = estimate.predicted
        assert abs(estimate.mean - predicted) <= max(3 * estimate.stderr, 0.05 * predicted)

    def test_defect_means_match_mu(self):
        ds, bip = DegreeSequence.regular(200, 4), Bipartition.from_left(200, range(50))
        report = estimate_defect_means(ds, bip, 100_000, seed=13)
        for name in ("b0", "b1", "b2"):
            estimate = report.estimates[name]
            assert abs(estimate.mean - estimate.predicted) <= 0.05 * estimate.predicted + 3 * estimate.stderr

    def test_conditional_two_path_means(self):
        ds, bip = DegreeSequence.regular(200, 4), Bipartition.from_left(200, range(40))
        report = estimate_class_conditional(ds, bip, ClassKey(), 40_000, seed=17)
        assert report.identity_violations == 0
        assert report.a[1].mean == pytest.approx(report.predicted["a1"], rel=0.05)
        assert report.b[1].mean == pytest.approx(report.a[1].mean ** 2, rel=0.10)
