"""Regressor families behind one fit/predict/importance contract."""

from .base import (  # noqa: F401
    DEFAULTS,
    FAMILIES,
    RegressorModel,
    RegressorSpec,
    data_fingerprint,
    model_from_dict,
    schema_hash,
)
from .elastic_net import ElasticNetModel, fit_elastic_net, fit_elastic_net_cv  # noqa: F401
from .ensemble import (  # noqa: F401
    BaggedCartModel,
    GradientBoostingModel,
    RandomForestModel,
    fit_bagged_cart,
    fit_random_forest,
    fit_sgb,
)
from .knn import KnnModel, fit_knn  # noqa: F401
from .linear import LinearModel, fit_lm  # noqa: F401
from .tree import CartModel, fit_cart  # noqa: F401


def fit_spec(spec: RegressorSpec, X, y, columns=None):
    """Fit whatever family the spec names, with defaults filled in."""
    hp = spec.resolved()
    if spec.family == "LM":
        return fit_lm(X, y, columns=columns)
    if spec.family == "GLMNET":
        if "lam" in spec.hyperparameters:
            return fit_elastic_net(
                X, y, hp["lam"], hp["alpha"], hp["max_iter"], hp["tol"],
                columns=columns,
            )
        return fit_elastic_net_cv(
            X, y, hp["alpha"], hp["n_lambdas"], hp["inner_k"], spec.seed,
            hp["max_iter"], hp["tol"], columns=columns,
        )
    if spec.family == "KNN":
        return fit_knn(X, y, hp["k"], columns=columns)
    if spec.family == "CART":
        return fit_cart(
            X, y, hp["max_depth"], hp["min_samples_leaf"],
            hp["min_variance_decrease"], columns=columns,
        )
    if spec.family == "BCART":
        return fit_bagged_cart(
            X, y, hp["n_trees"], spec.seed, hp["bootstrap"], hp["max_depth"],
            hp["min_samples_leaf"], hp["min_variance_decrease"], columns=columns,
        )
    if spec.family == "RF":
        return fit_random_forest(
            X, y, hp["n_trees"], hp["mtry"], spec.seed, hp["bootstrap"],
            hp["max_depth"], hp["min_samples_leaf"], hp["min_variance_decrease"],
            columns=columns,
        )
    if spec.family == "SGB":
        return fit_sgb(
            X, y, hp["n_trees"], hp["learning_rate"], hp["subsample"],
            hp["max_depth"], spec.seed, hp["min_samples_leaf"],
            hp["min_variance_decrease"], columns=columns,
        )
    raise ValueError(f"unknown family {spec.family!r}")  # pragma: no cover
