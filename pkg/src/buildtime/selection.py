"""Wrapper feature selection on top of the random forest: RFE and Boruta."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .dataset import FeatureMatrix
from .evaluate import kfold_indices, rmse
from .models import RegressorSpec, fit_spec

log = logging.getLogger(__name__)


@dataclass
class RfeProfile:
    subset_sizes: list
    mean_rmse: list
    sd_rmse: list
    best_size: int
    best_features: list
    ranking: list  # all features, best first, from the full-data fit

    def to_dict(self):
        return {
            "report": "rfe",
            "subset_sizes": self.subset_sizes,
            "mean_rmse": self.mean_rmse,
            "sd_rmse": self.sd_rmse,
            "best_size": self.best_size,
            "best_features": self.best_features,
            "ranking": self.ranking,
        }


def _importance_order(model, p):
    """Feature indices ranked best-first; stable on ties."""
    imp = model.importance
    if imp is None:
        imp = np.zeros(p)
    return np.argsort(-np.asarray(imp), kind="stable")


def _derive_seed(seed, stream):
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def _spec_for_size(spec, size):
    """Clamp mtry when refitting on a subset smaller than it."""
    hp = dict(spec.hyperparameters)
    if hp.get("mtry") is not None and hp["mtry"] > size:
        hp["mtry"] = size
    return RegressorSpec(spec.family, hp, spec.seed)


def rfe(matrix: FeatureMatrix, sizes, cv, rf_spec: RegressorSpec) -> RfeProfile:
    """Recursive feature elimination profiled by cross-validation.

    Per fold: fit on all features, rank once by importance, then retrain
    on each requested top-size subset and score the held-out rows. The
    winning size minimizes mean CV RMSE (ties to the smaller size); the
    reported feature list comes from a final full-data ranking.
    """
    p = matrix.n_columns
    sizes = sorted(set(int(s) for s in sizes))
    if not sizes or sizes[0] < 1 or sizes[-1] > p:
        raise ValueError(f"sizes must lie in [1, {p}], got {sizes}")

    folds = kfold_indices(matrix.n_rows, cv)
    all_rows = np.arange(matrix.n_rows)
    per_size = {s: [] for s in sizes}
    for repeat_folds in folds:
        for held_out in repeat_folds:
            train = np.setdiff1d(all_rows, held_out, assume_unique=True)
            Xtr, ytr = matrix.values[train], matrix.response[train]
            Xte, yte = matrix.values[held_out], matrix.response[held_out]
            full = fit_spec(rf_spec, Xtr, ytr, matrix.column_names)
            order = _importance_order(full, p)
            for s in sizes:
                if s == p:
                    model, cols = full, slice(None)
                else:
                    cols = np.sort(order[:s])
                    model = fit_spec(_spec_for_size(rf_spec, s), Xtr[:, cols], ytr)
                per_size[s].append(rmse(yte, model.predict(Xte[:, cols])))

    mean_rmse = [float(np.mean(per_size[s])) for s in sizes]
    sd_rmse = [float(np.std(per_size[s], ddof=1)) if len(per_size[s]) > 1 else 0.0
               for s in sizes]
    best_size = sizes[int(np.argmin(mean_rmse))]

    final = fit_spec(rf_spec, matrix.values, matrix.response, matrix.column_names)
    ranking = [matrix.column_names[j] for j in _importance_order(final, p)]
    return RfeProfile(
        subset_sizes=sizes,
        mean_rmse=mean_rmse,
        sd_rmse=sd_rmse,
        best_size=best_size,
        best_features=ranking[:best_size],
        ranking=ranking,
    )


@dataclass
class BorutaVerdict:
    status: dict                      # feature -> confirmed|rejected|tentative
    hits: dict
    trials: int
    alpha: float
    max_iter: int
    importance_history: list = field(default_factory=list)

    def features(self, wanted):
        return [f for f, s in self.status.items() if s == wanted]

    def to_dict(self):
        return {
            "report": "boruta",
            "status": self.status,
            "hits": self.hits,
            "trials": self.trials,
            "alpha": self.alpha,
            "max_iter": self.max_iter,
            "importance_history": self.importance_history,
        }


def boruta(matrix: FeatureMatrix, alpha=0.05, max_iter=50,
           rf_spec: RegressorSpec = None) -> BorutaVerdict:
    """Shadow-feature selection with an exact binomial hit test.

    Each iteration appends a permuted copy of every real column, fits the
    forest on real + shadow, and credits a hit to any real feature whose
    importance beats the best shadow. Accumulated hits are tested
    two-sided against p=0.5; significance confirms (more hits) or rejects
    (fewer). Undecided features at max_iter stay tentative.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    rf_spec = rf_spec or RegressorSpec("RF", {"n_trees": 100}, seed=0)
    names = list(matrix.column_names)
    p = len(names)
    X = matrix.values
    y = matrix.response

    hits = np.zeros(p, dtype=int)
    status = {name: "tentative" for name in names}
    history = []
    for it in range(1, max_iter + 1):
        shadow = np.empty_like(X)
        for j in range(p):
            rng = np.random.default_rng([rf_spec.seed, it, j])
            shadow[:, j] = X[rng.permutation(X.shape[0]), j]
        design = np.hstack([X, shadow])
        iter_spec = RegressorSpec(
            rf_spec.family, rf_spec.hyperparameters, _derive_seed(rf_spec.seed, it)
        )
        model = fit_spec(iter_spec, design, y)
        imp = model.importance
        imp = np.zeros(2 * p) if imp is None else np.asarray(imp)
        shadow_max = imp[p:].max()
        hits += imp[:p] > shadow_max
        history.append(imp[:p].tolist())

        for j, name in enumerate(names):
            if status[name] != "tentative":
                continue
            test = binomtest(int(hits[j]), it, 0.5)
            if test.pvalue < alpha:
                status[name] = "confirmed" if hits[j] > it / 2 else "rejected"

    return BorutaVerdict(
        status=status,
        hits={name: int(hits[j]) for j, name in enumerate(names)},
        trials=max_iter,
        alpha=alpha,
        max_iter=max_iter,
        importance_history=history,
    )
