"""TravisTorrent-schema ingestion: load, clean, shuffle, split, encode.

Every operation is a pure function of (input, seed); tables are never
mutated in place, so concurrent readers are safe.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import SchemaError

log = logging.getLogger(__name__)

# Predictor columns, in canonical order. 30 integer/numeric features
# followed by 4 boolean features; the response column is kept separate.
NUMERIC_FEATURES = [
    "gh_team_size",
    "gh_num_issue_comments",
    "gh_num_commit_comments",
    "gh_num_pr_comments",
    "gh_src_churn",
    "gh_test_churn",
    "gh_files_added",
    "gh_files_deleted",
    "gh_files_modified",
    "gh_tests_added",
    "gh_tests_deleted",
    "gh_src_files",
    "gh_doc_files",
    "gh_other_files",
    "tr_tests_ok",
    "tr_tests_fail",
    "tr_tests_run",
    "tr_tests_skipped",
    "tr_testduration",
    "gh_test_lines_per_kloc",
    "gh_test_cases_per_kloc",
    "gh_asserts_cases_per_kloc",
    "gh_description_complexity",
    "tr_num_jobs",
    "gh_commits_on_files_touched",
    "gh_sloc",
    "tr_setup_time",
    "tr_purebuildduration",
    "git_num_committers",
    "tr_ci_latency",
]
BOOLEAN_FEATURES = [
    "gh_is_pr",
    "tr_tests_ran",
    "tr_tests_failed",
    "gh_by_core_team_member",
]
FEATURE_COLUMNS = NUMERIC_FEATURES + BOOLEAN_FEATURES
RESPONSE = "tr_duration"

_MISSING = {"", "NA", "na", "NaN", "nan", "NULL", "null", "None"}
_TRUE = {"true", "t", "1", "1.0", "yes"}
_FALSE = {"false", "f", "0", "0.0", "no"}


@dataclass(frozen=True)
class RawTable:
    """A loaded CSV with ingestion bookkeeping attached."""

    frame: pd.DataFrame
    unknown_columns: tuple = ()
    missing_columns: tuple = ()
    dropped_na_count: int = 0
    dropped_invalid_count: int = 0

    @property
    def n_rows(self):
        return len(self.frame)

    @property
    def columns(self):
        return list(self.frame.columns)


@dataclass(frozen=True)
class SplitIndices:
    train_rows: np.ndarray
    test_rows: np.ndarray
    seed: int
    fraction: float

    def __post_init__(self):
        n = len(self.train_rows) + len(self.test_rows)
        combined = np.concatenate([self.train_rows, self.test_rows])
        if len(np.unique(combined)) != n:
            raise ValueError("train and test rows must be disjoint and exhaustive")


@dataclass
class FeatureMatrix:
    """Dense encoded matrix plus column bookkeeping and the response."""

    values: np.ndarray
    column_names: list
    response: np.ndarray
    response_name: str = RESPONSE
    imputation: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.response = np.asarray(self.response, dtype=np.float64)
        if self.values.shape[0] != self.response.shape[0]:
            raise ValueError("row count mismatch between values and response")
        if len(self.column_names) != self.values.shape[1]:
            raise ValueError("column_names length mismatch")
        if len(set(self.column_names)) != len(self.column_names):
            raise ValueError("duplicate column names")
        if self.values.size and not np.isfinite(self.values).all():
            raise ValueError("encoded matrix contains missing or non-finite values")

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_columns(self):
        return self.values.shape[1]

    def select_columns(self, names):
        idx = [self.column_names.index(n) for n in names]
        return FeatureMatrix(
            self.values[:, idx],
            list(names),
            self.response,
            self.response_name,
            dict(self.imputation),
        )

    def save(self, path):
        """Columnar cache: versioned npz with a JSON metadata member."""
        meta = {
            "format": "buildtime-matrix",
            "version": 1,
            "column_names": self.column_names,
            "response_name": self.response_name,
            "imputation": self.imputation,
        }
        np.savez_compressed(
            path,
            values=self.values,
            response=self.response,
            meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
        )

    @classmethod
    def load(cls, path):
        with np.load(path) as archive:
            meta = json.loads(archive["meta"].tobytes().decode())
            if meta.get("format") != "buildtime-matrix":
                raise SchemaError(f"{path}: not a buildtime matrix cache")
            return cls(
                archive["values"],
                meta["column_names"],
                archive["response"],
                meta["response_name"],
                meta["imputation"],
            )


def load_csv(path, schema=None):
    """Read a CSV with a header row and report schema drift.

    Unknown columns are retained but flagged; schema columns that are
    absent are reported. Only when *every* expected column is missing is
    the file rejected outright.
    """
    schema = list(schema) if schema is not None else FEATURE_COLUMNS + [RESPONSE]
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    unknown = tuple(c for c in frame.columns if c not in schema)
    missing = tuple(c for c in schema if c not in frame.columns)
    if len(missing) == len(schema):
        raise SchemaError(f"{path}: none of the expected columns are present")
    if unknown:
        log.info("%s: %d columns outside the schema retained", path, len(unknown))
    if missing:
        log.warning("%s: missing schema columns: %s", path, ", ".join(missing))
    return RawTable(frame, unknown_columns=unknown, missing_columns=missing)


def _parse_duration(raw):
    """Seconds or None; negatives and junk map to the invalid marker."""
    text = str(raw).strip()
    if text in _MISSING:
        return None
    try:
        value = float(text)
    except ValueError:
        return "invalid"
    if not np.isfinite(value) or value < 0:
        return "invalid"
    return value


def clean(table):
    """Drop rows whose response is missing or unusable, keeping order."""
    if RESPONSE not in table.frame.columns:
        raise SchemaError(f"column {RESPONSE!r} is required for cleaning")
    parsed = table.frame[RESPONSE].map(_parse_duration)
    na_mask = parsed.isna()
    invalid_mask = parsed == "invalid"
    keep = ~(na_mask | invalid_mask)
    frame = table.frame.loc[keep].reset_index(drop=True)
    return RawTable(
        frame,
        unknown_columns=table.unknown_columns,
        missing_columns=table.missing_columns,
        dropped_na_count=int(na_mask.sum()),
        dropped_invalid_count=int(invalid_mask.sum()),
    )


def shuffle(table, seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(table.n_rows)
    frame = table.frame.iloc[perm].reset_index(drop=True)
    return RawTable(
        frame,
        unknown_columns=table.unknown_columns,
        missing_columns=table.missing_columns,
        dropped_na_count=table.dropped_na_count,
        dropped_invalid_count=table.dropped_invalid_count,
    )


def split(table, fraction, seed):
    """Seeded train/test partition. |train| = floor(fraction * n)."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n = table.n_rows
    if n == 0:
        raise ValueError("cannot split an empty table")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(np.floor(fraction * n))
    return SplitIndices(
        train_rows=np.sort(perm[:n_train]),
        test_rows=np.sort(perm[n_train:]),
        seed=seed,
        fraction=fraction,
    )


def _parse_numeric_column(series):
    def parse(raw):
        text = str(raw).strip()
        if text in _MISSING:
            return np.nan
        try:
            return float(text)
        except ValueError:
            return np.nan

    return series.map(parse).to_numpy(dtype=np.float64)


def _parse_boolean_column(series):
    def parse(raw):
        text = str(raw).strip().lower()
        if text in _MISSING or text == "none":
            return np.nan
        if text in _TRUE:
            return 1.0
        if text in _FALSE:
            return 0.0
        return np.nan

    return series.map(parse).to_numpy(dtype=np.float64)


def encode(table, feature_spec=None, imputation=None):
    """Build the numeric design matrix from a cleaned table.

    Booleans map to {0, 1}; remaining missing predictor values are
    imputed with the column median (numeric) or mode (boolean) computed
    over this table, unless frozen constants from a previous encode are
    supplied via ``imputation`` (the predict-time path).
    """
    features = list(feature_spec) if feature_spec is not None else FEATURE_COLUMNS
    absent = [c for c in features if c not in table.frame.columns]
    if absent:
        raise SchemaError(f"predictor columns absent from input: {', '.join(absent)}")
    if RESPONSE not in table.frame.columns:
        raise SchemaError(f"response column {RESPONSE!r} absent from input")

    n = table.n_rows
    columns = np.empty((n, len(features)), dtype=np.float64)
    fitted = {}
    for j, name in enumerate(features):
        is_bool = name in BOOLEAN_FEATURES
        parse = _parse_boolean_column if is_bool else _parse_numeric_column
        col = parse(table.frame[name])
        missing = np.isnan(col)
        if imputation is not None:
            fill = imputation[name]
        else:
            present = col[~missing]
            if present.size == 0:
                raise SchemaError(f"column {name!r} has no usable values")
            if is_bool:
                fill = float(np.mean(present) >= 0.5)  # mode of {0,1}
            else:
                fill = float(np.median(present))
        fitted[name] = fill
        col[missing] = fill
        columns[:, j] = col

    parsed = table.frame[RESPONSE].map(_parse_duration)
    if parsed.isna().any() or (parsed == "invalid").any():
        raise SchemaError("encode requires a cleaned table (unusable response present)")
    response = parsed.to_numpy(dtype=np.float64)

    return FeatureMatrix(
        columns,
        features,
        response,
        imputation=fitted if imputation is None else dict(imputation),
    )


def subsample(matrix, n, seed):
    """Draw n rows without replacement, deterministically."""
    if n > matrix.n_rows:
        raise ValueError(f"cannot subsample {n} of {matrix.n_rows} rows")
    rng = np.random.default_rng(seed)
    rows = rng.choice(matrix.n_rows, size=n, replace=False)
    return FeatureMatrix(
        matrix.values[rows],
        list(matrix.column_names),
        matrix.response[rows],
        matrix.response_name,
        dict(matrix.imputation),
    )
