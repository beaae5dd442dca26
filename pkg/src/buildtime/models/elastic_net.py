"""Elastic-net regression by cyclic coordinate descent.

Objective (X assumed standardized, intercept handled by centering):

    (1 / 2n) * ||y - b0 - X beta||^2 + lam * (alpha * ||beta||_1
                                              + (1 - alpha) / 2 * ||beta||_2^2)
"""

import numpy as np

from ..errors import ConvergenceError
from .base import RegressorModel, register_family


@register_family
class ElasticNetModel(RegressorModel):
    family = "GLMNET"

    def __init__(self, columns, intercept, coefficients, lam, alpha, n_iter):
        super().__init__(columns)
        self.intercept = float(intercept)
        self.coefficients = np.asarray(coefficients, dtype=np.float64)
        self.lam = float(lam)
        self.alpha = float(alpha)
        self.n_iter = int(n_iter)

    def predict(self, X):
        X = self.check_schema(X)
        return self.intercept + X @ self.coefficients

    def params_dict(self):
        return {
            "intercept": self.intercept,
            "coefficients": self.coefficients.tolist(),
            "lam": self.lam,
            "alpha": self.alpha,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_dict(cls, d):
        p = d["params"]
        return cls(d["columns"], p["intercept"], p["coefficients"], p["lam"],
                   p["alpha"], p["n_iter"])


def soft_threshold(z, gamma):
    return np.sign(z) * max(abs(z) - gamma, 0.0)


def fit_elastic_net(X, y, lam, alpha=0.5, max_iter=10_000, tol=1e-7, columns=None):
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(p)]

    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean

    col_sq = (Xc * Xc).sum(axis=0) / n
    beta = np.zeros(p)
    residual = yc.copy()
    for iteration in range(1, max_iter + 1):
        max_delta = 0.0
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            old = beta[j]
            rho = (Xc[:, j] @ residual) / n + col_sq[j] * old
            new = soft_threshold(rho, lam * alpha) / (col_sq[j] + lam * (1.0 - alpha))
            if new != old:
                residual -= (new - old) * Xc[:, j]
                beta[j] = new
                max_delta = max(max_delta, abs(new - old))
        if max_delta < tol:
            intercept = y_mean - x_mean @ beta
            return ElasticNetModel(columns, intercept, beta, lam, alpha, iteration)

    raise ConvergenceError(
        f"coordinate descent did not converge in {max_iter} iterations",
        coefficients=beta,
        intercept=y_mean - x_mean @ beta,
    )


def lambda_grid(X, y, alpha, n_lambdas=10, ratio=1e-3):
    """Log-spaced grid from the smallest lam that zeroes every slope."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    lam_max = np.abs(Xc.T @ yc).max() / (n * max(alpha, 1e-3))
    if lam_max <= 0:
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * ratio, n_lambdas)


def fit_elastic_net_cv(X, y, alpha=0.5, n_lambdas=10, inner_k=5, seed=0,
                       max_iter=10_000, tol=1e-7, columns=None):
    """Pick lam by inner k-fold CV over a log grid, then refit on all rows."""
    from ..evaluate import CvSpec, kfold_indices, rmse

    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    grid = lambda_grid(X, y, alpha, n_lambdas)
    folds = kfold_indices(n, CvSpec(k=min(inner_k, n), repeats=1, seed=seed))[0]
    all_rows = np.arange(n)

    cv_rmse = np.zeros(len(grid))
    for held_out in folds:
        train = np.setdiff1d(all_rows, held_out, assume_unique=True)
        for i, lam in enumerate(grid):
            model = fit_elastic_net(X[train], y[train], lam, alpha, max_iter, tol)
            cv_rmse[i] += rmse(y[held_out], model.predict(X[held_out]))
    best = int(np.argmin(cv_rmse))
    return fit_elastic_net(X, y, float(grid[best]), alpha, max_iter, tol, columns)
