"""CART regression trees built on the split-search kernel.

Greedy binary splitting minimizing weighted child SSE. Candidate
thresholds are midpoints between consecutive sorted unique values; ties
in gain break toward the lower column index, then the lower threshold.
"""

import numpy as np

from .. import _kernels
from .base import RegressorModel, register_family


def _node_sse(y):
    s1 = y.sum()
    return float((y * y).sum() - s1 * s1 / y.size)


def _build(X, y, rows, depth, params, rng, mtry, importances):
    sub_y = y[rows]
    n = rows.size
    mean = float(sub_y.mean())
    leaf = {"value": mean, "count": int(n)}
    if depth >= params["max_depth"] or n < 2 * params["min_samples_leaf"]:
        return leaf
    parent_sse = _node_sse(sub_y)
    if parent_sse <= 0.0:
        return leaf

    p = X.shape[1]
    if mtry is not None and mtry < p:
        features = np.sort(rng.choice(p, size=mtry, replace=False))
    else:
        features = np.arange(p)

    best_gain = -np.inf
    best = None
    for f in features:
        v = X[rows, f]
        order = np.argsort(v, kind="stable")
        pos, gain = _kernels.scan_sorted(
            np.ascontiguousarray(v[order]),
            np.ascontiguousarray(sub_y[order]),
            parent_sse,
            params["min_samples_leaf"],
        )
        if pos >= 0 and gain > best_gain:
            vs = v[order]
            best_gain = gain
            best = (int(f), float((vs[pos - 1] + vs[pos]) / 2.0))

    if best is None or best_gain / n < params["min_variance_decrease"]:
        return leaf

    f, threshold = best
    go_left = X[rows, f] <= threshold
    importances[f] += best_gain
    return {
        "feature": f,
        "threshold": threshold,
        "left": _build(X, y, rows[go_left], depth + 1, params, rng, mtry, importances),
        "right": _build(X, y, rows[~go_left], depth + 1, params, rng, mtry, importances),
    }


def _predict_into(node, X, rows, out):
    if "value" in node:
        out[rows] = node["value"]
        return
    go_left = X[rows, node["feature"]] <= node["threshold"]
    _predict_into(node["left"], X, rows[go_left], out)
    _predict_into(node["right"], X, rows[~go_left], out)


def tree_predict(root, X):
    out = np.empty(X.shape[0])
    _predict_into(root, X, np.arange(X.shape[0]), out)
    return out


def tree_depth(node):
    if "value" in node:
        return 0
    return 1 + max(tree_depth(node["left"]), tree_depth(node["right"]))


def grow_tree(X, y, params, rng=None, mtry=None):
    """Fit one tree; returns (root node, raw per-feature SSE reductions)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    importances = np.zeros(X.shape[1])
    root = _build(X, y, np.arange(X.shape[0]), 0, params, rng, mtry, importances)
    return root, importances


@register_family
class CartModel(RegressorModel):
    family = "CART"

    def __init__(self, columns, root, raw_importance):
        super().__init__(columns)
        self.root = root
        self.raw_importance = np.asarray(raw_importance, dtype=np.float64)

    @property
    def importance(self):
        total = self.raw_importance.sum()
        if total <= 0:
            return None
        return self.raw_importance / total

    def predict(self, X):
        X = self.check_schema(X)
        return tree_predict(self.root, X)

    def params_dict(self):
        return {"root": self.root, "raw_importance": self.raw_importance.tolist()}

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        return cls(d["columns"], p["root"], p["raw_importance"])


def fit_cart(X, y, max_depth=30, min_samples_leaf=5, min_variance_decrease=1e-7,
             columns=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if min_samples_leaf < 1:
        raise ValueError("min_samples_leaf must be at least 1")
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(X.shape[1])]
    params = {
        "max_depth": max_depth,
        "min_samples_leaf": min_samples_leaf,
        "min_variance_decrease": min_variance_decrease,
    }
    root, imp = grow_tree(X, y, params)
    return CartModel(columns, root, imp)
