import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buildtime.dataset import FeatureMatrix
from buildtime.errors import SchemaError
from buildtime.preprocess import (
    PlanRecipe,
    PreprocessPlan,
    apply_plan,
    find_correlated,
    fit_boxcox,
    fit_pca,
    fit_plan,
    fit_standardizer,
)
from conftest import random_matrix


def _matrix(values, names=None):
    values = np.asarray(values, dtype=np.float64)
    names = names or [f"c{j}" for j in range(values.shape[1])]
    return FeatureMatrix(values, names, np.zeros(values.shape[0]))


class TestStandardizer:
    def test_hand_computed_column(self):
        m = _matrix([[2.0], [4.0], [6.0]])
        std = fit_standardizer(m)
        assert std.means[0] == 4.0
        assert std.scales[0] == pytest.approx(2.0)  # sample sd
        np.testing.assert_allclose(std.transform(m.values)[:, 0], [-1.0, 0.0, 1.0])

    def test_constant_column_flagged(self):
        m = _matrix([[5.0], [5.0], [5.0]])
        std = fit_standardizer(m)
        assert std.constant == (True,)
        np.testing.assert_array_equal(std.transform(m.values), np.zeros((3, 1)))

    def test_already_standardized_near_identity(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=500)
        x = (x - x.mean()) / x.std(ddof=1)
        m = _matrix(x.reshape(-1, 1))
        std = fit_standardizer(m)
        assert abs(std.means[0]) < 1e-12
        assert std.scales[0] == pytest.approx(1.0, abs=1e-12)

    def test_transformed_moments(self):
        m = random_matrix(n=200, p=4, seed=1)
        std = fit_standardizer(m)
        z = std.transform(m.values)
        assert np.abs(z.mean(axis=0)).max() < 1e-9
        assert np.abs(z.std(axis=0, ddof=1) - 1).max() < 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
    def test_round_trip_property(self, data):
        m = _matrix(np.asarray(data).reshape(-1, 1))
        std = fit_standardizer(m)
        back = std.inverse(std.transform(m.values))
        scale = max(1.0, np.abs(m.values).max())
        assert np.abs(back - m.values).max() / scale < 1e-10


class TestBoxCox:
    def test_lognormal_lambda_near_zero(self):
        rng = np.random.default_rng(2)
        m = _matrix(np.exp(rng.normal(size=800)).reshape(-1, 1))
        power = fit_boxcox(m)
        assert abs(power.lambdas[0]) <= 0.2

    def test_grid_search_matches_oracle(self):
        rng = np.random.default_rng(3)
        x = rng.gamma(2.0, 3.0, size=300)
        m = _matrix(x.reshape(-1, 1))
        power = fit_boxcox(m)

        # independent oracle: same grid, likelihood evaluated from scratch
        def loglik(lam):
            z = np.log(x) if lam == 0 else (x**lam - 1) / lam
            return -0.5 * len(x) * np.log(z.var()) + (lam - 1) * np.log(x).sum()

        grid = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.1), 10)
        best = grid[int(np.argmax([loglik(l) for l in grid]))]
        assert power.lambdas[0] == pytest.approx(best)

    def test_identity_lambda_transform(self):
        m = _matrix(np.array([[1.0], [2.0], [3.0]]))
        power = fit_boxcox(m, grid=[1.0])
        np.testing.assert_allclose(power.transform(m.values)[:, 0], [0.0, 1.0, 2.0])

    def test_nonpositive_column_skipped(self):
        m = _matrix(np.array([[0.0], [1.0], [2.0]]))
        power = fit_boxcox(m)
        assert power.lambdas == (None,)
        np.testing.assert_array_equal(power.transform(m.values), m.values)

    def test_monotone_for_fitted_lambdas(self):
        rng = np.random.default_rng(4)
        x = np.sort(rng.gamma(1.5, 2.0, size=100) + 0.1)
        m = _matrix(x.reshape(-1, 1))
        power = fit_boxcox(m)
        z = power.transform(m.values)[:, 0]
        assert (np.diff(z) > 0).all()


def _min_drop_oracle(corr, cutoff):
    """Smallest drop set leaving no pair above the cutoff; exhaustive."""
    p = corr.shape[0]
    for size in range(p + 1):
        for drop in itertools.combinations(range(p), size):
            keep = [j for j in range(p) if j not in drop]
            ok = all(
                abs(corr[i, j]) <= cutoff
                for i, j in itertools.combinations(keep, 2)
            )
            if ok:
                return size
    return p


class TestFindCorrelated:
    def test_identical_columns_drop_one(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=100)
        m = _matrix(np.column_stack([x, x]))
        drops = find_correlated(m, 0.70)
        assert len(drops.dropped_columns) == 1

    def test_residual_below_cutoff(self):
        rng = np.random.default_rng(6)
        base = rng.normal(size=(200, 3))
        cols = np.column_stack([
            base[:, 0],
            base[:, 0] * 0.95 + rng.normal(size=200) * 0.1,
            base[:, 1],
            base[:, 1] * 0.9 + rng.normal(size=200) * 0.2,
            base[:, 2],
        ])
        m = _matrix(cols)
        drops = find_correlated(m, 0.70)
        keep = [j for j, c in enumerate(m.column_names)
                if c not in drops.dropped_columns]
        sub = np.corrcoef(cols[:, keep], rowvar=False)
        np.fill_diagonal(sub, 0.0)
        assert np.abs(sub).max() <= 0.70

    def test_pair_with_independent_third(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=300)
        b = a * 0.92 + rng.normal(size=300) * 0.2
        c = rng.normal(size=300)
        m = _matrix(np.column_stack([a, b, c]), ["a", "b", "c"])
        drops = find_correlated(m, 0.70)
        assert len(drops.dropped_columns) == 1
        assert drops.dropped_columns[0] in ("a", "b")

    @pytest.mark.parametrize("seed,cluster_sizes", [
        (0, [2, 1, 1]), (1, [3, 2]), (2, [2, 2, 2]), (3, [4, 1]), (4, [3, 1, 1]),
    ])
    def test_matches_minimal_oracle_size(self, seed, cluster_sizes):
        # planted clusters: near-copies within a cluster, independent across
        rng = np.random.default_rng(seed)
        n = 400
        cols = []
        for size in cluster_sizes:
            base = rng.normal(size=n)
            for _ in range(size):
                cols.append(base + rng.normal(size=n) * 0.05)
        cols = np.column_stack(cols)
        m = _matrix(cols)
        drops = find_correlated(m, 0.70)
        corr = np.corrcoef(cols, rowvar=False)
        assert len(drops.dropped_columns) == _min_drop_oracle(corr, 0.70)
        keep = [j for j, c in enumerate(m.column_names)
                if c not in drops.dropped_columns]
        sub = np.abs(corr[np.ix_(keep, keep)])
        np.fill_diagonal(sub, 0.0)
        assert sub.max() <= 0.70


class TestPca:
    def test_perfectly_correlated_pair(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=100)
        m = _matrix(np.column_stack([x, x]))
        std_m = _matrix(fit_standardizer(m).transform(m.values))
        pca = fit_pca(std_m, 0.95)
        assert pca.k == 1
        assert pca.explained_variance_fraction[0] == pytest.approx(1.0, abs=1e-8)

    def test_full_variance_target_reconstructs(self):
        m = random_matrix(n=60, p=4, seed=9)
        std_m = _matrix(fit_standardizer(m).transform(m.values))
        pca = fit_pca(std_m, 1.0)
        assert pca.k == 4
        projected = std_m.values @ pca.rotation
        recovered = projected @ pca.rotation.T
        assert np.abs(recovered - std_m.values).max() < 1e-8

    def test_orthonormal_rotation(self):
        m = random_matrix(n=80, p=5, seed=10)
        pca = fit_pca(m, 0.9)
        gram = pca.rotation.T @ pca.rotation
        assert np.abs(gram - np.eye(pca.k)).max() < 1e-8

    def test_fractions_match_eigen_oracle(self):
        rng = np.random.default_rng(11)
        values = rng.normal(size=(50, 5)) @ rng.normal(size=(5, 5))
        m = _matrix(values)
        pca = fit_pca(m, 1.0)
        centered = values - values.mean(axis=0)
        eigvals = np.sort(np.linalg.eigvalsh(np.cov(centered, rowvar=False)))[::-1]
        np.testing.assert_allclose(
            pca.explained_variance_fraction, eigvals / eigvals.sum(), atol=1e-6
        )
        assert (np.diff(pca.explained_variance_fraction) <= 1e-12).all()
        assert pca.explained_variance_fraction.sum() == pytest.approx(1.0, abs=1e-8)


class TestPlan:
    def test_apply_matches_fit_output(self):
        m = random_matrix(n=100, p=6, seed=12)
        recipe = PlanRecipe(boxcox=False, drop_correlated_cutoff=0.7,
                            pca_variance_target=0.99)
        plan = fit_plan(m, recipe)
        a = apply_plan(plan, m)
        b = apply_plan(plan, m)
        np.testing.assert_array_equal(a.values, b.values)

    def test_apply_uses_training_statistics(self):
        train = random_matrix(n=100, p=3, seed=13)
        plan = fit_plan(train, PlanRecipe())
        row = FeatureMatrix(np.full((1, 3), 100.0), train.column_names, np.zeros(1))
        out = apply_plan(plan, row)
        std = plan.transforms[0]
        expected = (100.0 - std.means) / std.scales
        np.testing.assert_allclose(out.values[0], expected)

    def test_drop_then_pca_column_count(self):
        rng = np.random.default_rng(14)
        x = rng.normal(size=(120, 4))
        values = np.column_stack([x, x[:, 0] * 0.99 + rng.normal(size=120) * 0.01])
        m = _matrix(values)
        plan = fit_plan(m, PlanRecipe(drop_correlated_cutoff=0.7,
                                      pca_variance_target=1.0))
        out = apply_plan(plan, m)
        assert out.n_columns == 4
        assert out.column_names == ["pc1", "pc2", "pc3", "pc4"]

    def test_column_mismatch_rejected(self):
        m = random_matrix(n=50, p=3, seed=15)
        plan = fit_plan(m, PlanRecipe())
        wrong = FeatureMatrix(m.values, ["x", "y", "z"], m.response)
        with pytest.raises(SchemaError):
            apply_plan(plan, wrong)

    def test_refit_after_apply_is_identity_stats(self):
        m = random_matrix(n=150, p=4, seed=16)
        plan = fit_plan(m, PlanRecipe())
        out = apply_plan(plan, m)
        refit = fit_standardizer(out)
        assert np.abs(refit.means).max() < 1e-9
        assert np.abs(refit.scales - 1).max() < 1e-9

    def test_serialization_round_trip(self):
        m = random_matrix(n=90, p=5, seed=17)
        recipe = PlanRecipe(drop_correlated_cutoff=0.8, pca_variance_target=0.9)
        plan = fit_plan(m, recipe)
        restored = PreprocessPlan.from_dict(plan.to_dict())
        a = apply_plan(plan, m)
        b = apply_plan(restored, m)
        np.testing.assert_array_equal(a.values, b.values)
