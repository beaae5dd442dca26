"""Pipeline configuration: YAML file mirroring the run protocol defaults."""

from dataclasses import dataclass, field

import yaml

from .models import RegressorSpec
from .preprocess import PlanRecipe

DEFAULT_ROSTER = ["LM", "GLMNET", "KNN", "CART", "BCART", "RF", "SGB"]


@dataclass
class PipelineConfig:
    data_path: str = "travistorrent.csv"
    out_dir: str = "out"
    split_fraction: float = 0.7
    cv_k: int = 10
    cv_repeats: int = 3
    subsample_n: int = 10_000
    seeds: dict = field(default_factory=lambda: {
        "shuffle": 1, "split": 2, "subsample": 3, "cv": 4, "model": 5,
    })
    boxcox: bool = False
    drop_correlated_cutoff: float | None = 0.70
    pca_variance_target: float | None = None
    refit_preprocess_per_fold: bool = True
    roster: list = field(default_factory=lambda: list(DEFAULT_ROSTER))
    hyperparameters: dict = field(default_factory=dict)  # family -> overrides
    serve_family: str = "RF"

    def recipe(self):
        return PlanRecipe(
            boxcox=self.boxcox,
            standardize=True,
            drop_correlated_cutoff=self.drop_correlated_cutoff,
            pca_variance_target=self.pca_variance_target,
        )

    def spec(self, family):
        return RegressorSpec(
            family, dict(self.hyperparameters.get(family, {})), self.seeds["model"]
        )

    def roster_specs(self):
        return [self.spec(f) for f in self.roster]

    def to_dict(self):
        return {
            "data_path": self.data_path,
            "out_dir": self.out_dir,
            "split_fraction": self.split_fraction,
            "cv_k": self.cv_k,
            "cv_repeats": self.cv_repeats,
            "subsample_n": self.subsample_n,
            "seeds": dict(self.seeds),
            "boxcox": self.boxcox,
            "drop_correlated_cutoff": self.drop_correlated_cutoff,
            "pca_variance_target": self.pca_variance_target,
            "refit_preprocess_per_fold": self.refit_preprocess_per_fold,
            "roster": list(self.roster),
            "hyperparameters": dict(self.hyperparameters),
            "serve_family": self.serve_family,
        }

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base = cls()
        merged = {**base.to_dict(), **d}
        if "seeds" in d:
            merged["seeds"] = {**base.seeds, **d["seeds"]}
        return cls(**merged)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        return cls.from_dict(data)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)
