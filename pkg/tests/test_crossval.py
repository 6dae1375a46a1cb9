import numpy as np
import pytest

from triagekit.crossval import (
    grid_search,
    repeated_stratified_cv,
    stratified_fold_indices,
)
from triagekit.errors import TrainingError
from triagekit.gbtree import predict_proba

from .conftest import random_classification, small_hp


class TestFoldAssignment:
    def test_every_row_held_out_once(self):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 2, 37)
        folds = stratified_fold_indices(y, 5, np.random.default_rng(1))
        combined = np.sort(np.concatenate(folds))
        assert np.array_equal(combined, np.arange(37))

    def test_class_proportions_within_one_row(self):
        rng = np.random.default_rng(2)
        y = np.r_[np.zeros(33, dtype=int), np.ones(22, dtype=int)]
        rng.shuffle(y)
        folds = stratified_fold_indices(y, 5, np.random.default_rng(3))
        for fold in folds:
            pos = int(y[fold].sum())
            neg = fold.size - pos
            assert abs(pos - 22 / 5) < 1.0
            assert abs(neg - 33 / 5) < 1.0

    def test_deterministic_given_rng_seed(self):
        y = np.r_[np.zeros(20, dtype=int), np.ones(20, dtype=int)]
        f1 = stratified_fold_indices(y, 4, np.random.default_rng(9))
        f2 = stratified_fold_indices(y, 4, np.random.default_rng(9))
        assert all(np.array_equal(a, b) for a, b in zip(f1, f2))


class TestRepeatedCV:
    def test_fold_count(self):
        rng = np.random.default_rng(4)
        X, y = random_classification(rng, n=60, d=3)
        report = repeated_stratified_cv(
            X, y, small_hp(n_estimators=2), folds=5, repeats=2, seed=0
        )
        assert len(report.fold_scores) == 10
        assert report.folds == 5 and report.repeats == 2

    def test_ci_brackets_mean(self):
        rng = np.random.default_rng(5)
        X, y = random_classification(rng, n=60, d=3)
        report = repeated_stratified_cv(
            X, y, small_hp(n_estimators=2), folds=5, repeats=2, seed=0
        )
        lo, hi = report.accuracy_ci
        assert lo <= report.mean_accuracy <= hi
        lo, hi = report.auc_ci
        assert lo <= report.mean_auc <= hi

    def test_class_smaller_than_folds_rejected(self):
        X = np.random.default_rng(0).normal(size=(10, 2))
        y = np.r_[np.ones(3, dtype=int), np.zeros(7, dtype=int)]
        with pytest.raises(TrainingError):
            repeated_stratified_cv(X, y, small_hp(), folds=5, repeats=1, seed=0)

    def test_single_class_rejected(self):
        X = np.zeros((20, 2))
        with pytest.raises(TrainingError):
            repeated_stratified_cv(X, np.ones(20, dtype=int), small_hp(), seed=0)

    def test_parallel_matches_sequential(self):
        rng = np.random.default_rng(6)
        X, y = random_classification(rng, n=50, d=3)
        hp = small_hp(n_estimators=2)
        seq = repeated_stratified_cv(X, y, hp, folds=4, repeats=2, seed=3, jobs=1)
        par = repeated_stratified_cv(X, y, hp, folds=4, repeats=2, seed=3, jobs=4)
        assert seq == par


class TestGridSearch:
    def test_single_point_identity(self):
        rng = np.random.default_rng(7)
        X, y = random_classification(rng, n=50, d=3)
        result = grid_search(
            X, y, {"max_depth": [2]}, base=small_hp(n_estimators=2),
            folds=4, repeats=1, seed=0,
        )
        assert result.best_params == {"max_depth": 2}
        assert result.best_hyperparams.max_depth == 2
        # refit model predicts on the training shape
        assert predict_proba(result.model, X).shape == (50,)

    def test_failing_point_skipped(self):
        rng = np.random.default_rng(8)
        X, y = random_classification(rng, n=40, d=3)

        # subsample so small that floor() would give 0 rows is invalid -> error
        result = grid_search(
            X, y, {"learning_rate": [0.3], "subsample": [-1.0, 1.0]},
            base=small_hp(n_estimators=2), folds=4, repeats=1, seed=0,
        )
        errors = [p for p in result.table if p.error is not None]
        assert len(errors) == 1
        assert result.best_params["subsample"] == 1.0

    def test_all_points_failing_raises(self):
        rng = np.random.default_rng(9)
        X, y = random_classification(rng, n=40, d=2)
        with pytest.raises(TrainingError):
            grid_search(X, y, {"subsample": [-1.0, -2.0]}, base=small_hp(), seed=0)

    def test_selection_order_free(self):
        rng = np.random.default_rng(10)
        X, y = random_classification(rng, n=60, d=3)
        base = small_hp(n_estimators=2)
        r1 = grid_search(X, y, {"max_depth": [1, 3], "learning_rate": [0.2, 0.5]},
                         base=base, folds=4, repeats=1, seed=1)
        r2 = grid_search(X, y, {"learning_rate": [0.5, 0.2], "max_depth": [3, 1]},
                         base=base, folds=4, repeats=1, seed=1)
        assert r1.best_params == r2.best_params

    def test_table_covers_product(self):
        rng = np.random.default_rng(11)
        X, y = random_classification(rng, n=40, d=2)
        result = grid_search(
            X, y, {"max_depth": [1, 2], "gamma": [0.0, 0.5, 1.0]},
            base=small_hp(n_estimators=2), folds=4, repeats=1, seed=0,
        )
        assert len(result.table) == 6
