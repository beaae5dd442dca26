"""k-nearest-neighbour regression (brute force, Euclidean)."""

import numpy as np

from .base import RegressorModel, register_family


@register_family
class KnnModel(RegressorModel):
    """Stores the training sample; prediction averages the k nearest
    responses. Distance ties break toward the lower training-row index
    (stable argsort)."""

    family = "KNN"

    def __init__(self, columns, X, y, k):
        super().__init__(columns)
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        self.k = int(k)

    def predict(self, X):
        X = self.check_schema(X)
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            d2 = ((self.X - row) ** 2).sum(axis=1)
            nearest = np.argsort(d2, kind="stable")[: self.k]
            out[i] = self.y[nearest].mean()
        return out

    def params_dict(self):
        return {"X": self.X.tolist(), "y": self.y.tolist(), "k": self.k}

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        return cls(d["columns"], p["X"], p["y"], p["k"])


def fit_knn(X, y, k, columns=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k={k} out of range for {X.shape[0]} training rows")
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(X.shape[1])]
    return KnnModel(columns, X, y, k)
