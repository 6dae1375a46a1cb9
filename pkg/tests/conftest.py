import numpy as np
import pytest

from triagekit.dataset import (
    bundled_cohort_path,
    derive_labels,
    drop_missing,
    encode,
    load_csv,
)
from triagekit.gbtree import Hyperparams, train_ensemble


def small_hp(**overrides):
    base = dict(
        alpha=0.0, gamma=0.0, n_estimators=3, min_child_weight=0.0,
        subsample=1.0, colsample_bytree=1.0, learning_rate=0.5,
        max_depth=3, lambda_=1.0, base_score=0.5,
    )
    base.update(overrides)
    return Hyperparams(**base)


def random_classification(rng, n=40, d=4):
    X = rng.normal(size=(n, d))
    w = rng.normal(size=d)
    y = (X @ w + 0.5 * rng.normal(size=n) > 0).astype(np.int64)
    if y.min() == y.max():  # force both classes
        y[0] = 1 - y[0]
    return X, y


@pytest.fixture(scope="session")
def tiny_model():
    rng = np.random.default_rng(7)
    X, y = random_classification(rng, n=60, d=5)
    return train_ensemble(X, y, small_hp(), seed=3), X, y


@pytest.fixture(scope="session")
def bundled_cohort():
    return load_csv(bundled_cohort_path())


@pytest.fixture(scope="session")
def clean_cohort(bundled_cohort):
    return drop_missing(bundled_cohort)


@pytest.fixture(scope="session")
def mortality_matrix(clean_cohort):
    matrix = encode(clean_cohort)
    return matrix, derive_labels(matrix, "mortality")
