"""Metrics, repeated k-fold CV, and the multi-algorithm benchmark harness."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureMatrix, subsample
from .preprocess import PlanRecipe, apply_plan, fit_plan

log = logging.getLogger(__name__)

SUMMARY_FIELDS = ("min", "q1", "median", "mean", "q3", "max")


def rmse(y, yhat):
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape or y.ndim != 1:
        raise ValueError(f"shape mismatch: {y.shape} vs {yhat.shape}")
    if y.size == 0:
        raise ValueError("empty input")
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def r_squared(y, yhat):
    """Squared Pearson correlation between observed and predicted.

    Returns None when either vector is constant (the NA case). The
    residual-based alternative, which can go negative, is logged at
    debug level for transparency but never reported.
    """
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape or y.ndim != 1:
        raise ValueError(f"shape mismatch: {y.shape} vs {yhat.shape}")
    if y.size < 2:
        raise ValueError("need at least two observations")
    dy = y - y.mean()
    dyh = yhat - yhat.mean()
    ss_y = float(dy @ dy)
    ss_yh = float(dyh @ dyh)
    if ss_y == 0.0 or ss_yh == 0.0:
        return None
    value = float(dy @ dyh) ** 2 / (ss_y * ss_yh)
    if log.isEnabledFor(logging.DEBUG):
        resid = y - yhat
        log.debug(
            "r_squared=%.6f (residual-based alternative: %.6f)",
            value,
            1.0 - float(resid @ resid) / ss_y,
        )
    return value


@dataclass(frozen=True)
class CvSpec:
    k: int = 10
    repeats: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")


@dataclass(frozen=True)
class MetricPair:
    rmse: float | None
    r_squared: float | None

    def to_dict(self):
        return {"rmse": self.rmse, "r_squared": self.r_squared}


def kfold_indices(n, spec: CvSpec):
    """Held-out index arrays, one list of k folds per repeat.

    Within a repeat the folds partition range(n) with sizes differing by
    at most one. Each repeat draws an independent seeded permutation.
    """
    if spec.k > n:
        raise ValueError(f"k={spec.k} exceeds n={n}")
    repeats = []
    for r in range(spec.repeats):
        rng = np.random.default_rng([spec.seed, r])
        perm = rng.permutation(n)
        base, extra = divmod(n, spec.k)
        folds, start = [], 0
        for f in range(spec.k):
            size = base + (1 if f < extra else 0)
            folds.append(np.sort(perm[start : start + size]))
            start += size
        repeats.append(folds)
    return repeats


@dataclass
class CvReport:
    """Per-fold metric observations plus recomputable summaries."""

    algorithm: str
    folds: list = field(default_factory=list)  # MetricPair per (repeat, fold)
    k: int = 0
    repeats: int = 0

    def metric_values(self, metric):
        return [getattr(f, metric) for f in self.folds]

    def na_count(self, metric):
        return sum(1 for v in self.metric_values(metric) if v is None)

    def summary(self, metric):
        """Six-number summary (linear-interpolation quartiles) + NA count."""
        values = [v for v in self.metric_values(metric) if v is not None]
        if not values:
            return {f: None for f in SUMMARY_FIELDS} | {"na": self.na_count(metric)}
        arr = np.asarray(values, dtype=np.float64)
        return {
            "min": float(arr.min()),
            "q1": float(np.quantile(arr, 0.25)),
            "median": float(np.quantile(arr, 0.5)),
            "mean": float(arr.mean()),
            "q3": float(np.quantile(arr, 0.75)),
            "max": float(arr.max()),
            "na": self.na_count(metric),
        }

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "repeats": self.repeats,
            "folds": [f.to_dict() for f in self.folds],
            "summary": {
                "rmse": self.summary("rmse"),
                "r_squared": self.summary("r_squared"),
            },
        }

    @classmethod
    def from_dict(cls, d):
        folds = [MetricPair(f["rmse"], f["r_squared"]) for f in d["folds"]]
        return cls(d["algorithm"], folds, d["k"], d["repeats"])


def _matrix_rows(matrix, rows):
    return FeatureMatrix(
        matrix.values[rows],
        list(matrix.column_names),
        matrix.response[rows],
        matrix.response_name,
        dict(matrix.imputation),
    )


def cross_validate(spec, matrix, cv, recipe=None, folds=None, refit_preprocess=True):
    """Repeated k-fold CV of one regressor spec.

    The preprocess plan is re-fit inside every fold by default so no
    statistic leaks from held-out rows; refit_preprocess=False replicates
    the standardize-before-CV shortcut instead. Fold fit failures are
    recorded as NA observations, never raised.
    """
    from .models import fit_spec  # local import, avoids cycle

    recipe = recipe or PlanRecipe()
    if folds is None:
        folds = kfold_indices(matrix.n_rows, cv)
    shared_plan = None
    prepared = matrix
    if not refit_preprocess:
        shared_plan = fit_plan(matrix, recipe)
        prepared = apply_plan(shared_plan, matrix)

    report = CvReport(algorithm=spec.family, k=cv.k, repeats=cv.repeats)
    all_rows = np.arange(matrix.n_rows)
    for repeat_folds in folds:
        for held_out in repeat_folds:
            train_rows = np.setdiff1d(all_rows, held_out, assume_unique=True)
            try:
                if refit_preprocess:
                    train = _matrix_rows(matrix, train_rows)
                    plan = fit_plan(train, recipe)
                    train = apply_plan(plan, train)
                    test = apply_plan(plan, _matrix_rows(matrix, held_out))
                else:
                    train = _matrix_rows(prepared, train_rows)
                    test = _matrix_rows(prepared, held_out)
                model = fit_spec(spec, train.values, train.response, train.column_names)
                yhat = model.predict(test.values)
                report.folds.append(
                    MetricPair(rmse(test.response, yhat), r_squared(test.response, yhat))
                )
            except Exception:
                log.exception("fold fit failed for %s; recording NA", spec.family)
                report.folds.append(MetricPair(None, None))
    return report


def benchmark(specs, matrix, cv, subsample_n=None, subsample_seed=0, recipe=None,
              refit_preprocess=True):
    """Run a roster of specs on one shared subsample with shared folds.

    Sharing the fold assignments makes the comparison paired: every
    algorithm sees byte-identical train/held-out partitions.
    """
    if not specs:
        raise ValueError("empty spec roster")
    bench = matrix
    if subsample_n is not None and subsample_n < matrix.n_rows:
        bench = subsample(matrix, subsample_n, subsample_seed)
    folds = kfold_indices(bench.n_rows, cv)
    return [
        cross_validate(s, bench, cv, recipe, folds=folds,
                       refit_preprocess=refit_preprocess)
        for s in specs
    ]


def test_evaluate(pipelines, test_matrix, subsample_n=None, seed=0):
    """Held-out metrics for fitted pipelines on a seeded test subsample."""
    sample = test_matrix
    if subsample_n is not None and subsample_n < test_matrix.n_rows:
        sample = subsample(test_matrix, subsample_n, seed)
    results = []
    for pipeline in pipelines:
        yhat = pipeline.predict_matrix(sample)
        results.append(
            MetricPair(rmse(sample.response, yhat), r_squared(sample.response, yhat))
        )
    return results
