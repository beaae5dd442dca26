"""Uniform fit/predict/importance contract shared by all regressor families."""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import SchemaError

FAMILIES = ("LM", "GLMNET", "KNN", "CART", "BCART", "RF", "SGB")

# Allowed hyperparameter names per family; values checked by each fitter.
FAMILY_PARAMS = {
    "LM": set(),
    "GLMNET": {"lam", "alpha", "max_iter", "tol", "n_lambdas", "inner_k"},
    "KNN": {"k"},
    "CART": {"max_depth", "min_samples_leaf", "min_variance_decrease"},
    "BCART": {"n_trees", "bootstrap", "max_depth", "min_samples_leaf",
              "min_variance_decrease"},
    "RF": {"n_trees", "mtry", "bootstrap", "max_depth", "min_samples_leaf",
           "min_variance_decrease"},
    "SGB": {"n_trees", "learning_rate", "subsample", "max_depth",
            "min_samples_leaf", "min_variance_decrease"},
}

DEFAULTS = {
    "LM": {},
    "GLMNET": {"alpha": 0.5, "max_iter": 10_000, "tol": 1e-7, "n_lambdas": 10,
               "inner_k": 5},
    "KNN": {"k": 5},
    "CART": {"max_depth": 30, "min_samples_leaf": 5, "min_variance_decrease": 1e-7},
    "BCART": {"n_trees": 25, "bootstrap": True, "max_depth": 30,
              "min_samples_leaf": 5, "min_variance_decrease": 1e-7},
    "RF": {"n_trees": 500, "mtry": None, "bootstrap": True, "max_depth": 30,
           "min_samples_leaf": 5, "min_variance_decrease": 1e-7},
    "SGB": {"n_trees": 150, "learning_rate": 0.1, "subsample": 0.5, "max_depth": 3,
            "min_samples_leaf": 5, "min_variance_decrease": 1e-7},
}


@dataclass(frozen=True)
class RegressorSpec:
    family: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        unknown = set(self.hyperparameters) - FAMILY_PARAMS[self.family]
        if unknown:
            raise ValueError(
                f"{self.family} does not accept hyperparameters: {sorted(unknown)}"
            )

    def resolved(self):
        return {**DEFAULTS[self.family], **self.hyperparameters}


class RegressorModel:
    """Base for fitted models: predict on arrays matching the fit schema."""

    family = None

    def __init__(self, columns):
        self.columns = list(columns)

    @property
    def importance(self):
        """Per-feature importance vector, or None for families without one."""
        return None

    def check_schema(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.columns):
            raise SchemaError(
                f"expected {len(self.columns)} columns, got shape {X.shape}"
            )
        return X

    def predict(self, X):  # pragma: no cover - abstract
        raise NotImplementedError

    def params_dict(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def to_dict(self):
        return {
            "family": self.family,
            "columns": self.columns,
            "params": self.params_dict(),
        }


_REGISTRY = {}


def register_family(cls):
    _REGISTRY[cls.family] = cls
    return cls


def model_from_dict(d):
    try:
        cls = _REGISTRY[d["family"]]
    except KeyError:
        raise SchemaError(f"unknown model family {d.get('family')!r}") from None
    return cls.from_dict(d)


def schema_hash(columns):
    """Stable fingerprint of a column schema, for wire/file versioning."""
    payload = json.dumps(list(columns), separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def data_fingerprint(X, y):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(X, dtype=np.float64).tobytes())
    h.update(np.ascontiguousarray(y, dtype=np.float64).tobytes())
    return h.hexdigest()[:16]
