"""Saved model container: preprocess plan + fitted model + metadata.

JSON keeps float round-trips exact, so a loaded pipeline predicts
bit-identically to the in-memory one.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureMatrix
from .errors import SchemaError
from .models import model_from_dict, schema_hash
from .preprocess import PreprocessPlan, apply_plan

FORMAT = "buildtime-model-container"
VERSION = 1

# Fields the demo predictor foregrounds; everything else is filled from
# stored training means.
FOREGROUND_FEATURES = [
    "gh_team_size",
    "gh_src_churn",
    "gh_test_churn",
    "gh_files_added",
    "gh_files_deleted",
    "gh_files_modified",
    "tr_num_jobs",
]


@dataclass
class FittedPipeline:
    """A model plus the plan that prepares its inputs, as one unit."""

    plan: PreprocessPlan
    model: object
    feature_columns: list          # raw predictor schema, pre-transform
    feature_means: dict            # raw training means, for mean imputation
    metadata: dict = field(default_factory=dict)

    @property
    def schema_hash(self):
        return schema_hash(self.feature_columns)

    def predict_matrix(self, matrix: FeatureMatrix):
        if list(matrix.column_names) != list(self.feature_columns):
            raise SchemaError(
                "input columns do not match the pipeline's training schema"
            )
        return self.model.predict(apply_plan(self.plan, matrix).values)

    def resolve_request(self, supplied):
        """Full raw feature vector: user values, training means elsewhere."""
        unknown = [k for k in supplied if k not in self.feature_columns]
        if unknown:
            raise SchemaError(
                f"unknown features {unknown}; valid names: {self.feature_columns}"
            )
        row = []
        for name in self.feature_columns:
            if name in supplied:
                value = supplied[name]
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise SchemaError(f"feature {name!r} needs a numeric value")
                row.append(float(value))
            else:
                row.append(float(self.feature_means[name]))
        return np.asarray(row, dtype=np.float64)

    def predict_request(self, supplied):
        """Predicted duration in seconds for a partial feature map."""
        row = self.resolve_request(supplied)
        matrix = FeatureMatrix(
            row.reshape(1, -1),
            list(self.feature_columns),
            np.zeros(1),
            imputation=dict(self.plan.imputation),
        )
        return float(self.predict_matrix(matrix)[0])

    def foreground_features(self):
        return [f for f in FOREGROUND_FEATURES if f in self.feature_columns]

    def to_dict(self):
        return {
            "format": FORMAT,
            "version": VERSION,
            "schema_hash": self.schema_hash,
            "feature_columns": list(self.feature_columns),
            "feature_means": self.feature_means,
            "plan": self.plan.to_dict(),
            "model": self.model.to_dict(),
            "metadata": self.metadata,
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != FORMAT:
            raise SchemaError("not a buildtime model container")
        if d.get("version") != VERSION:
            raise SchemaError(f"unsupported container version {d.get('version')}")
        return cls(
            plan=PreprocessPlan.from_dict(d["plan"]),
            model=model_from_dict(d["model"]),
            feature_columns=list(d["feature_columns"]),
            feature_means=dict(d["feature_means"]),
            metadata=dict(d.get("metadata", {})),
        )

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def render_duration(seconds):
    """Humanized h:mm:ss alongside raw seconds."""
    total = max(0, int(round(seconds)))
    h, rem = divmod(total, 3600)
    m, s = divmod(rem, 60)
    return f"{h}:{m:02d}:{s:02d}"
