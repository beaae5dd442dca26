import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buildtime.dataset import FeatureMatrix
from buildtime.evaluate import (
    CvSpec,
    MetricPair,
    benchmark,
    cross_validate,
    kfold_indices,
    r_squared,
    rmse,
)
from buildtime.models import RegressorSpec
from buildtime.preprocess import PlanRecipe
from conftest import random_matrix


class TestRmse:
    def test_equal_vectors_zero(self):
        assert rmse([1, 2, 3], [1, 2, 3]) == 0.0

    def test_constant_offset(self):
        assert rmse([10, 10, 10], [13, 13, 13]) == pytest.approx(3.0)

    def test_hand_arithmetic(self):
        assert rmse([0, 0], [3, 4]) == pytest.approx(np.sqrt(12.5))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rmse([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            rmse([], [])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
    def test_nonnegative_zero_iff_equal(self, values):
        y = np.asarray(values)
        assert rmse(y, y) == 0.0
        shifted = y + 1.0
        assert rmse(y, shifted) > 0.0


class TestRSquared:
    def test_perfect_affine_is_one(self):
        y = np.array([1.0, 2.0, 3.0, 4.0])
        assert r_squared(y, 2 * y + 5) == pytest.approx(1.0)

    def test_constant_prediction_undefined(self):
        assert r_squared([1.0, 2.0, 3.0], [4.0, 4.0, 4.0]) is None

    def test_matches_pearson_oracle(self):
        y = np.array([1.0, 2.0, 3.0, 4.0])
        yhat = np.array([1.0, 2.0, 3.0, 5.0])
        expected = float(np.corrcoef(y, yhat)[0, 1]) ** 2
        assert r_squared(y, yhat) == pytest.approx(expected, abs=1e-12)

    def test_affine_invariance_positive_slope(self):
        rng = np.random.default_rng(0)
        y = rng.normal(size=40)
        yhat = y + rng.normal(size=40) * 0.5
        base = r_squared(y, yhat)
        assert r_squared(y, 3.0 * yhat + 10.0) == pytest.approx(base, abs=1e-12)

    def test_bounded_in_unit_interval(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            y = rng.normal(size=20)
            yhat = rng.normal(size=20)
            value = r_squared(y, yhat)
            assert 0.0 <= value <= 1.0


class TestKfold:
    def test_singleton_folds(self):
        folds = kfold_indices(10, CvSpec(k=10, repeats=1, seed=0))
        assert len(folds) == 1
        assert all(len(f) == 1 for f in folds[0])
        assert sorted(np.concatenate(folds[0]).tolist()) == list(range(10))

    def test_three_repeats_partition(self):
        folds = kfold_indices(100, CvSpec(k=10, repeats=3, seed=1))
        assert len(folds) == 3
        for repeat in folds:
            combined = np.concatenate(repeat)
            assert len(combined) == 100
            assert len(np.unique(combined)) == 100

    def test_k_exceeds_n(self):
        with pytest.raises(ValueError):
            kfold_indices(7, CvSpec(k=10, repeats=1, seed=0))

    def test_fold_sizes_balanced(self):
        folds = kfold_indices(23, CvSpec(k=5, repeats=1, seed=2))[0]
        sizes = sorted(len(f) for f in folds)
        assert sizes == [4, 4, 5, 5, 5]

    @pytest.mark.parametrize("seed", range(3))
    def test_random_cases_exhaustive_disjoint(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(30):
            n = int(rng.integers(5, 300))
            k = int(rng.integers(2, min(n, 12) + 1))
            repeats = int(rng.integers(1, 4))
            folds = kfold_indices(n, CvSpec(k=k, repeats=repeats, seed=seed))
            for repeat in folds:
                combined = np.sort(np.concatenate(repeat))
                assert np.array_equal(combined, np.arange(n))


class TestCrossValidate:
    def test_constant_response_zero_rmse(self):
        rng = np.random.default_rng(3)
        m = FeatureMatrix(rng.normal(size=(50, 3)), ["a", "b", "c"], np.full(50, 5.0))
        report = cross_validate(RegressorSpec("CART"), m, CvSpec(5, 1, 0))
        assert report.summary("rmse")["max"] == pytest.approx(0.0, abs=1e-12)
        # constant observations make correlation undefined
        assert report.na_count("r_squared") == 5

    def test_deterministic_report(self):
        m = random_matrix(n=80, p=4, seed=4)
        a = cross_validate(RegressorSpec("LM"), m, CvSpec(5, 2, 1))
        b = cross_validate(RegressorSpec("LM"), m, CvSpec(5, 2, 1))
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_noiseless_linear_near_zero_error(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(100, 3))
        y = X @ np.array([2.0, -1.0, 0.5]) + 4.0
        m = FeatureMatrix(X, ["a", "b", "c"], y)
        report = cross_validate(RegressorSpec("LM"), m, CvSpec(5, 1, 0))
        assert report.summary("rmse")["max"] < 1e-8

    def test_fold_count(self):
        m = random_matrix(n=60, p=3, seed=6)
        report = cross_validate(RegressorSpec("KNN", {"k": 3}), m, CvSpec(6, 2, 0))
        assert len(report.folds) == 12
        assert report.k == 6 and report.repeats == 2

    def test_failed_fits_recorded_not_raised(self):
        # LM cannot fit: more columns than fold-training rows
        rng = np.random.default_rng(7)
        m = FeatureMatrix(rng.normal(size=(12, 10)),
                          [f"c{j}" for j in range(10)], rng.normal(size=12))
        report = cross_validate(RegressorSpec("LM"), m, CvSpec(6, 1, 0))
        assert report.na_count("rmse") == 6

    def test_summary_recomputable_from_folds(self):
        m = random_matrix(n=70, p=3, seed=8)
        report = cross_validate(RegressorSpec("CART"), m, CvSpec(7, 2, 3))
        values = [v for v in report.metric_values("rmse") if v is not None]
        s = report.summary("rmse")
        assert s["mean"] == pytest.approx(np.mean(values), abs=1e-12)
        assert s["median"] == pytest.approx(np.quantile(values, 0.5), abs=1e-12)
        assert s["q1"] == pytest.approx(np.quantile(values, 0.25), abs=1e-12)

    def test_no_leakage_standardizer_fit_per_fold(self):
        # one extreme outlier in a known fold: with per-fold refit its
        # scale never touches folds that exclude it, so predictions on
        # training rows are unchanged when the held-out response changes
        m = random_matrix(n=40, p=2, seed=9)
        folds = kfold_indices(40, CvSpec(4, 1, 0))
        tampered = FeatureMatrix(m.values.copy(), list(m.column_names),
                                 m.response.copy())
        held = folds[0][0]
        tampered.response[held] = 1e6
        spec = RegressorSpec("LM")
        train_rows = np.setdiff1d(np.arange(40), held)
        from buildtime.models import fit_lm

        a = fit_lm(m.values[train_rows], m.response[train_rows])
        b = fit_lm(tampered.values[train_rows], tampered.response[train_rows])
        np.testing.assert_array_equal(
            a.predict(m.values[train_rows]), b.predict(m.values[train_rows])
        )


class TestBenchmark:
    def test_identical_specs_identical_reports(self):
        m = random_matrix(n=90, p=4, seed=10)
        reports = benchmark(
            [RegressorSpec("CART"), RegressorSpec("CART")], m,
            CvSpec(5, 1, 0), subsample_n=60, subsample_seed=1,
        )
        assert json.dumps(reports[0].to_dict()) == json.dumps(reports[1].to_dict())

    def test_shared_subsample_and_folds_paired(self):
        m = random_matrix(n=100, p=4, seed=11)
        reports = benchmark(
            [RegressorSpec("LM"), RegressorSpec("KNN", {"k": 5})], m,
            CvSpec(4, 2, 0), subsample_n=80, subsample_seed=2,
        )
        assert all(len(r.folds) == 8 for r in reports)

    def test_empty_roster_rejected(self):
        m = random_matrix(n=30, p=2, seed=12)
        with pytest.raises(ValueError):
            benchmark([], m, CvSpec(3, 1, 0))

    def test_nonlinear_fixture_ensembles_beat_linear(self):
        rng = np.random.default_rng(13)
        n = 400
        X = rng.normal(size=(n, 6))
        y = 30.0 * (X[:, 0] > 0) * X[:, 1] + 5.0 * X[:, 2] ** 2 + rng.normal(size=n)
        m = FeatureMatrix(X, [f"c{j}" for j in range(6)], y)
        reports = benchmark(
            [
                RegressorSpec("LM"),
                RegressorSpec("RF", {"n_trees": 30, "mtry": 3}, seed=1),
            ],
            m, CvSpec(5, 1, 0),
        )
        by_name = {r.algorithm: r.summary("rmse")["mean"] for r in reports}
        assert by_name["RF"] < by_name["LM"]


def test_metric_pair_serialization():
    pair = MetricPair(3.5, None)
    assert pair.to_dict() == {"rmse": 3.5, "r_squared": None}
