"""Tree ensembles: bagged CART, random forest, stochastic gradient boosting.

Each tree draws its randomness from a stream seeded by (master seed,
tree index), so results are independent of fitting order and tree-count
extension never perturbs earlier trees.
"""

import numpy as np

from .base import RegressorModel, register_family
from .tree import grow_tree, tree_predict


class _BaggedBase(RegressorModel):
    def __init__(self, columns, roots, raw_importance, seed):
        super().__init__(columns)
        self.roots = roots
        self.raw_importance = np.asarray(raw_importance, dtype=np.float64)
        self.seed = int(seed)

    @property
    def importance(self):
        """Total SSE reduction per feature across trees, normalized to sum 1."""
        total = self.raw_importance.sum()
        if total <= 0:
            return None
        return self.raw_importance / total

    def predict_per_tree(self, X):
        X = self.check_schema(X)
        return np.stack([tree_predict(root, X) for root in self.roots])

    def predict(self, X):
        return self.predict_per_tree(X).mean(axis=0)

    def params_dict(self):
        return {
            "roots": self.roots,
            "raw_importance": self.raw_importance.tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        return cls(d["columns"], p["roots"], p["raw_importance"], p["seed"])


@register_family
class BaggedCartModel(_BaggedBase):
    family = "BCART"


@register_family
class RandomForestModel(_BaggedBase):
    family = "RF"


def _cart_params(max_depth, min_samples_leaf, min_variance_decrease):
    return {
        "max_depth": max_depth,
        "min_samples_leaf": min_samples_leaf,
        "min_variance_decrease": min_variance_decrease,
    }


def _fit_bagged(cls, X, y, n_trees, seed, bootstrap, mtry, params, columns):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(X.shape[1])]
    roots = []
    importance = np.zeros(X.shape[1])
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        if bootstrap:
            rows = rng.integers(0, n, size=n)
        else:
            rows = np.arange(n)
        root, imp = grow_tree(X[rows], y[rows], params, rng=rng, mtry=mtry)
        roots.append(root)
        importance += imp
    return cls(columns, roots, importance, seed)


def fit_bagged_cart(X, y, n_trees=25, seed=0, bootstrap=True, max_depth=30,
                    min_samples_leaf=5, min_variance_decrease=1e-7, columns=None):
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    params = _cart_params(max_depth, min_samples_leaf, min_variance_decrease)
    return _fit_bagged(BaggedCartModel, X, y, n_trees, seed, bootstrap, None,
                       params, columns)


def fit_random_forest(X, y, n_trees=500, mtry=None, seed=0, bootstrap=True,
                      max_depth=30, min_samples_leaf=5, min_variance_decrease=1e-7,
                      columns=None):
    X = np.asarray(X, dtype=np.float64)
    p = X.shape[1]
    if mtry is None:
        mtry = max(1, p // 3)
    if not 1 <= mtry <= p:
        raise ValueError(f"mtry={mtry} out of range for {p} columns")
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    params = _cart_params(max_depth, min_samples_leaf, min_variance_decrease)
    return _fit_bagged(RandomForestModel, X, y, n_trees, seed, bootstrap, mtry,
                       params, columns)


@register_family
class GradientBoostingModel(RegressorModel):
    family = "SGB"

    def __init__(self, columns, initial, learning_rate, roots, seed):
        super().__init__(columns)
        self.initial = float(initial)
        self.learning_rate = float(learning_rate)
        self.roots = roots
        self.seed = int(seed)

    def predict(self, X, n_stages=None):
        X = self.check_schema(X)
        roots = self.roots if n_stages is None else self.roots[:n_stages]
        out = np.full(X.shape[0], self.initial)
        for root in roots:
            out += self.learning_rate * tree_predict(root, X)
        return out

    def staged_predict(self, X):
        """Predictions after each boosting stage, for diagnostics."""
        X = self.check_schema(X)
        out = np.full(X.shape[0], self.initial)
        yield out.copy()
        for root in self.roots:
            out += self.learning_rate * tree_predict(root, X)
            yield out.copy()

    def params_dict(self):
        return {
            "initial": self.initial,
            "learning_rate": self.learning_rate,
            "roots": self.roots,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        return cls(d["columns"], p["initial"], p["learning_rate"], p["roots"],
                   p["seed"])


def fit_sgb(X, y, n_trees=150, learning_rate=0.1, subsample=0.5, max_depth=3,
            seed=0, min_samples_leaf=5, min_variance_decrease=1e-7, columns=None):
    """Stagewise additive trees fit to residuals on row subsamples."""
    if not 0.0 <= learning_rate <= 1.0:
        raise ValueError("learning_rate must be in [0, 1]")
    if not 0.0 < subsample <= 1.0:
        raise ValueError("subsample must be in (0, 1]")
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(X.shape[1])]
    params = _cart_params(max_depth, min_samples_leaf, min_variance_decrease)

    initial = float(y.mean())
    current = np.full(n, initial)
    roots = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        m = max(1, int(round(subsample * n)))
        rows = np.sort(rng.choice(n, size=m, replace=False)) if m < n else np.arange(n)
        residual = y - current
        root, _ = grow_tree(X[rows], residual[rows], params, rng=rng)
        current += learning_rate * tree_predict(root, X)
        roots.append(root)
    return GradientBoostingModel(columns, initial, learning_rate, roots, seed)
