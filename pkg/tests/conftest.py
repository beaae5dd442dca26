import csv

import numpy as np
import pytest

from buildtime.dataset import (
    BOOLEAN_FEATURES,
    FEATURE_COLUMNS,
    NUMERIC_FEATURES,
    RESPONSE,
    FeatureMatrix,
)

EXTRA_COLUMNS = ["row_id", "gh_project_name", "gh_lang", "gh_first_commit_created_at"]


def write_travis_csv(path, n_rows=120, seed=0, na_response_frac=0.1,
                     na_predictor_frac=0.05):
    """Synthetic CSV following the TravisTorrent column layout.

    Durations depend on a few predictors so models have signal to find.
    """
    rng = np.random.default_rng(seed)
    header = EXTRA_COLUMNS + FEATURE_COLUMNS + [RESPONSE]
    rows = []
    for i in range(n_rows):
        record = {
            "row_id": str(i),
            "gh_project_name": f"org/project{i % 7}",
            "gh_lang": rng.choice(["ruby", "java"]),
            "gh_first_commit_created_at": "2016-01-01 00:00:00",
        }
        for name in NUMERIC_FEATURES:
            value = float(rng.poisson(20))
            if rng.random() < na_predictor_frac:
                record[name] = "NA"
            else:
                record[name] = f"{value:g}"
        for name in BOOLEAN_FEATURES:
            record[name] = rng.choice(["true", "false"])
        base = (
            10.0 * float(record.get("gh_team_size", "20").replace("NA", "20"))
            + 2.0 * float(record.get("gh_src_churn", "20").replace("NA", "20"))
            + rng.normal(0, 5)
        )
        if rng.random() < na_response_frac:
            record[RESPONSE] = "NA"
        else:
            record[RESPONSE] = f"{max(base, 1.0):.1f}"
        rows.append([record.get(c, "0") for c in header])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


@pytest.fixture
def travis_csv(tmp_path):
    return write_travis_csv(tmp_path / "travis.csv")


def random_matrix(n=100, p=5, seed=0, signal=True):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    if signal:
        y = 2.0 * X[:, 0] - X[:, 1 % p] + rng.normal(size=n) * 0.5
    else:
        y = rng.normal(size=n)
    return FeatureMatrix(X, [f"c{j}" for j in range(p)], y)
