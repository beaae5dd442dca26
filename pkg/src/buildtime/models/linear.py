"""Ordinary least squares via rank-revealing QR."""

import numpy as np
import scipy.linalg

from ..errors import SchemaError
from .base import RegressorModel, register_family


@register_family
class LinearModel(RegressorModel):
    family = "LM"

    def __init__(self, columns, intercept, coefficients):
        super().__init__(columns)
        self.intercept = float(intercept)
        self.coefficients = np.asarray(coefficients, dtype=np.float64)

    def predict(self, X):
        X = self.check_schema(X)
        return self.intercept + X @ self.coefficients

    def params_dict(self):
        return {
            "intercept": self.intercept,
            "coefficients": self.coefficients.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        return cls(d["columns"], p["intercept"], p["coefficients"])


def fit_lm(X, y, columns=None):
    """Least squares with an implicit intercept column.

    Rank deficiency is an error that names the dependent columns (found
    by pivoted QR) rather than silently picking one solution of many.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n <= p:
        raise ValueError(f"need more rows than columns, got {n} rows for {p} columns")
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(p)]

    design = np.column_stack([np.ones(n), X])
    _, r, piv = scipy.linalg.qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max() * max(design.shape) * np.finfo(np.float64).eps
    rank = int((diag > tol).sum())
    if rank < p + 1:
        dependent = sorted(piv[rank:])
        names = ["(intercept)" if j == 0 else columns[j - 1] for j in dependent]
        raise SchemaError(f"design matrix is rank deficient; dependent columns: {names}")

    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return LinearModel(columns, beta[0], beta[1:])
