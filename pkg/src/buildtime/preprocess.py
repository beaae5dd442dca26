"""Fitted, replayable data transforms.

A PreprocessPlan is an ordered list of fitted transforms. Fit order is
fixed: impute (done at encode time) -> optional power transform ->
standardize -> optional correlated-column drop -> optional PCA. Applying
a plan never re-fits anything from the incoming data.
"""

from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureMatrix
from .errors import SchemaError

DEFAULT_POWER_GRID = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.1), 10)


@dataclass(frozen=True)
class Standardizer:
    """Per-column center/scale constants (sample standard deviation)."""

    columns: tuple
    means: np.ndarray
    scales: np.ndarray
    constant: tuple  # flags, scale pinned to 1 for these

    def transform(self, X):
        return (X - self.means) / self.scales

    def inverse(self, X):
        return X * self.scales + self.means

    def to_dict(self):
        return {
            "kind": "standardize",
            "columns": list(self.columns),
            "means": self.means.tolist(),
            "scales": self.scales.tolist(),
            "constant": list(self.constant),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(d["columns"]),
            np.asarray(d["means"], dtype=np.float64),
            np.asarray(d["scales"], dtype=np.float64),
            tuple(d["constant"]),
        )


def fit_standardizer(X: FeatureMatrix) -> Standardizer:
    if X.n_rows == 0:
        raise ValueError("cannot fit a standardizer on an empty matrix")
    means = X.values.mean(axis=0)
    if X.n_rows > 1:
        scales = X.values.std(axis=0, ddof=1)
    else:
        scales = np.zeros(X.n_columns)
    constant = scales == 0.0
    scales = np.where(constant, 1.0, scales)
    return Standardizer(
        tuple(X.column_names), means, scales, tuple(bool(c) for c in constant)
    )


@dataclass(frozen=True)
class PowerTransform:
    """Box-Cox lambdas per column; nonpositive columns are skipped.

    lambda is chosen on a grid by maximizing the profile log-likelihood
    of the transformed column under a normal model.
    """

    columns: tuple
    lambdas: tuple        # float or None (skipped)
    log_likelihoods: tuple

    def transform(self, X):
        out = X.copy()
        for j, lam in enumerate(self.lambdas):
            if lam is None:
                continue
            col = out[:, j]
            if (col <= 0).any():
                raise ValueError(
                    f"column {self.columns[j]!r} has nonpositive values at apply time"
                )
            out[:, j] = _boxcox(col, lam)
        return out

    def to_dict(self):
        return {
            "kind": "power",
            "columns": list(self.columns),
            "lambdas": list(self.lambdas),
            "log_likelihoods": list(self.log_likelihoods),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["columns"]), tuple(d["lambdas"]), tuple(d["log_likelihoods"]))


def _boxcox(x, lam):
    if lam == 0.0:
        return np.log(x)
    return (np.power(x, lam) - 1.0) / lam


def _boxcox_loglik(x, lam):
    n = x.shape[0]
    z = _boxcox(x, lam)
    var = z.var()  # MLE variance
    if var <= 0:
        return -np.inf
    return -0.5 * n * np.log(var) + (lam - 1.0) * np.log(x).sum()


def fit_boxcox(X: FeatureMatrix, grid=None) -> PowerTransform:
    grid = DEFAULT_POWER_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("lambda grid is empty")
    lambdas, logliks = [], []
    for j in range(X.n_columns):
        col = X.values[:, j]
        if (col <= 0).any() or np.ptp(col) == 0:
            lambdas.append(None)
            logliks.append(None)
            continue
        lls = np.array([_boxcox_loglik(col, lam) for lam in grid])
        best = int(np.argmax(lls))
        lambdas.append(float(grid[best]))
        logliks.append(float(lls[best]))
    return PowerTransform(tuple(X.column_names), tuple(lambdas), tuple(logliks))


@dataclass(frozen=True)
class CorrelationDropSet:
    cutoff: float
    dropped_columns: tuple

    def to_dict(self):
        return {
            "kind": "drop_correlated",
            "cutoff": self.cutoff,
            "dropped_columns": list(self.dropped_columns),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["cutoff"], tuple(d["dropped_columns"]))


def find_correlated(X: FeatureMatrix, cutoff: float) -> CorrelationDropSet:
    """Greedy pruning of pairwise correlations above the cutoff.

    While some pair exceeds the cutoff in absolute value, take the worst
    pair and drop the member with the larger mean absolute correlation
    against everything else; ties go to the earlier column.
    """
    if X.n_columns < 2:
        raise ValueError("need at least two columns")
    if not 0.0 < cutoff < 1.0:
        raise ValueError(f"cutoff must be in (0, 1), got {cutoff}")

    corr = _correlation_matrix(X.values)
    active = list(range(X.n_columns))
    dropped = []
    while len(active) > 1:
        sub = np.abs(corr[np.ix_(active, active)])
        np.fill_diagonal(sub, 0.0)
        worst = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[worst] <= cutoff:
            break
        a, b = worst
        mean_a = sub[a].sum() / (len(active) - 1)
        mean_b = sub[b].sum() / (len(active) - 1)
        victim = a if mean_a >= mean_b else b
        dropped.append(active[victim])
        del active[victim]
    names = tuple(X.column_names[j] for j in sorted(dropped))
    return CorrelationDropSet(cutoff, names)


def _correlation_matrix(values):
    """Pearson correlations; constant columns correlate 0 with everything."""
    centered = values - values.mean(axis=0)
    sd = centered.std(axis=0, ddof=1)
    safe = np.where(sd == 0, 1.0, sd)
    z = centered / safe
    corr = z.T @ z / (values.shape[0] - 1)
    corr[sd == 0, :] = 0.0
    corr[:, sd == 0] = 0.0
    np.fill_diagonal(corr, 1.0)
    return corr


@dataclass(frozen=True)
class PcaModel:
    columns: tuple
    rotation: np.ndarray                   # p x k, orthonormal columns
    explained_variance_fraction: np.ndarray  # all p fractions, non-increasing
    k: int

    def transform(self, X):
        return X @ self.rotation

    def to_dict(self):
        return {
            "kind": "pca",
            "columns": list(self.columns),
            "rotation": self.rotation.tolist(),
            "explained_variance_fraction": self.explained_variance_fraction.tolist(),
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(d["columns"]),
            np.asarray(d["rotation"], dtype=np.float64),
            np.asarray(d["explained_variance_fraction"], dtype=np.float64),
            d["k"],
        )


def fit_pca(X: FeatureMatrix, variance_target: float = 0.95) -> PcaModel:
    """Eigendecomposition of the covariance of (already standardized) data.

    k is the smallest component count whose cumulative explained-variance
    fraction reaches the target.
    """
    if not 0.0 < variance_target <= 1.0:
        raise ValueError(f"variance_target must be in (0, 1], got {variance_target}")
    centered = X.values - X.values.mean(axis=0)
    cov = centered.T @ centered / max(X.n_rows - 1, 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    total = eigvals.sum()
    fractions = eigvals / total if total > 0 else np.full_like(eigvals, 0.0)
    cumulative = np.cumsum(fractions)
    k = int(np.searchsorted(cumulative, variance_target - 1e-12) + 1)
    k = min(k, X.n_columns)
    return PcaModel(tuple(X.column_names), eigvecs[:, :k].copy(), fractions, k)


_TRANSFORM_TYPES = {
    "standardize": Standardizer,
    "power": PowerTransform,
    "drop_correlated": CorrelationDropSet,
    "pca": PcaModel,
}


@dataclass
class PreprocessPlan:
    """Ordered fitted transforms plus the encode-time imputation constants."""

    transforms: list = field(default_factory=list)
    imputation: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "format": "buildtime-plan",
            "version": 1,
            "imputation": self.imputation,
            "transforms": [t.to_dict() for t in self.transforms],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != "buildtime-plan":
            raise SchemaError("not a preprocess plan")
        transforms = [
            _TRANSFORM_TYPES[t["kind"]].from_dict(t) for t in d["transforms"]
        ]
        return cls(transforms, dict(d["imputation"]))


@dataclass(frozen=True)
class PlanRecipe:
    """What to fit; the template handed to cross-validation."""

    boxcox: bool = False
    standardize: bool = True
    drop_correlated_cutoff: float | None = None
    pca_variance_target: float | None = None


def fit_plan(X: FeatureMatrix, recipe: PlanRecipe) -> PreprocessPlan:
    plan = PreprocessPlan(imputation=dict(X.imputation))
    current = X
    if recipe.boxcox:
        power = fit_boxcox(current)
        plan.transforms.append(power)
        current = _replace_values(current, power.transform(current.values))
    if recipe.standardize:
        std = fit_standardizer(current)
        plan.transforms.append(std)
        current = _replace_values(current, std.transform(current.values))
    if recipe.drop_correlated_cutoff is not None:
        drops = find_correlated(current, recipe.drop_correlated_cutoff)
        plan.transforms.append(drops)
        current = _drop_columns(current, drops.dropped_columns)
    if recipe.pca_variance_target is not None:
        pca = fit_pca(current, recipe.pca_variance_target)
        plan.transforms.append(pca)
        current = _pca_matrix(current, pca)
    return plan


def apply_plan(plan: PreprocessPlan, X: FeatureMatrix) -> FeatureMatrix:
    """Replay fitted transforms; statistics are never re-fit from X."""
    current = X
    for t in plan.transforms:
        if isinstance(t, (Standardizer, PowerTransform, PcaModel)):
            if tuple(current.column_names) != t.columns:
                raise SchemaError(
                    f"column mismatch applying {type(t).__name__}: "
                    f"{current.column_names} vs {list(t.columns)}"
                )
        if isinstance(t, (Standardizer, PowerTransform)):
            current = _replace_values(current, t.transform(current.values))
        elif isinstance(t, CorrelationDropSet):
            current = _drop_columns(current, t.dropped_columns)
        elif isinstance(t, PcaModel):
            current = _pca_matrix(current, t)
        else:  # pragma: no cover
            raise TypeError(f"unknown transform {type(t)!r}")
    return current


def _replace_values(X, values):
    return FeatureMatrix(
        values, list(X.column_names), X.response, X.response_name, dict(X.imputation)
    )


def _drop_columns(X, names):
    keep = [c for c in X.column_names if c not in set(names)]
    return X.select_columns(keep)


def _pca_matrix(X, pca):
    values = pca.transform(X.values)
    names = [f"pc{i + 1}" for i in range(pca.k)]
    return FeatureMatrix(values, names, X.response, X.response_name, dict(X.imputation))
