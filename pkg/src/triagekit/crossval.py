"""Repeated stratified k-fold cross-validation and exhaustive grid search."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TrainingError
from .gbtree import Hyperparams, predict_proba, train_ensemble, with_params
from .metrics import confusion, roc_curve, scalar_metrics


@dataclass(frozen=True)
class FoldScore:
    repeat: int
    fold: int
    accuracy: float
    auc_roc: float
    f_score: float


@dataclass(frozen=True)
class CVReport:
    fold_scores: tuple
    folds: int
    repeats: int

    def _stats(self, attr: str):
        vals = np.asarray([getattr(s, attr) for s in self.fold_scores])
        mean = float(vals.mean())
        # 95% normal interval over fold scores, matching how the
        # cross-validation spread is reported
        half = 1.96 * float(vals.std(ddof=1)) if vals.size > 1 else 0.0
        return mean, (mean - half, mean + half)

    @property
    def mean_accuracy(self):
        return self._stats("accuracy")[0]

    @property
    def accuracy_ci(self):
        return self._stats("accuracy")[1]

    @property
    def mean_auc(self):
        return self._stats("auc_roc")[0]

    @property
    def auc_ci(self):
        return self._stats("auc_roc")[1]

    @property
    def mean_f_score(self):
        return self._stats("f_score")[0]


def stratified_fold_indices(labels, folds: int, rng) -> list:
    """Deal each class round-robin into folds after a seeded shuffle.

    Guarantees per-fold class counts within one row of an even split.
    """
    y = np.asarray(labels)
    assignments = [[] for _ in range(folds)]
    for cls in np.unique(y):
        members = np.nonzero(y == cls)[0]
        members = members[rng.permutation(members.size)]
        for i, idx in enumerate(members):
            assignments[i % folds].append(int(idx))
    return [np.sort(np.asarray(a, dtype=np.int64)) for a in assignments]


def _score_fold(X, y, train_idx, test_idx, hp, train_seed, threshold=0.5):
    model = train_ensemble(X[train_idx], y[train_idx], hp, seed=train_seed)
    probs = predict_proba(model, X[test_idx])
    y_test = y[test_idx]
    report = scalar_metrics(confusion(y_test, (probs >= threshold).astype(np.int64)))
    auc = roc_curve(y_test, probs).auc
    f = report.f_score if report.f_score is not None else 0.0
    return report.accuracy, auc, f


def repeated_stratified_cv(X, y, hp: Hyperparams, folds: int = 5,
                           repeats: int = 20, seed: int = 0,
                           jobs: int = 1) -> CVReport:
    """Fresh seeded stratified fold assignment per repeat; score each fold."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    class_counts = np.bincount(y)
    small = np.nonzero((class_counts > 0) & (class_counts < folds))[0]
    if np.unique(y).size < 2:
        raise TrainingError("cross-validation needs both classes present")
    if small.size:
        raise TrainingError(
            f"class {small[0]} has {class_counts[small[0]]} members, "
            f"fewer than {folds} folds"
        )

    tasks = []
    for r in range(repeats):
        rng = np.random.default_rng((seed, r))
        fold_idx = stratified_fold_indices(y, folds, rng)
        everything = np.arange(y.size)
        for f, test_idx in enumerate(fold_idx):
            train_idx = np.setdiff1d(everything, test_idx)
            tasks.append((r, f, train_idx, test_idx))

    def run(task):
        r, f, train_idx, test_idx = task
        acc, auc, fs = _score_fold(X, y, train_idx, test_idx, hp,
                                   train_seed=seed + 1_000_003 * r + f)
        return FoldScore(repeat=r, fold=f, accuracy=acc, auc_roc=auc, f_score=fs)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(run, tasks))
    else:
        scores = [run(t) for t in tasks]
    return CVReport(fold_scores=tuple(scores), folds=folds, repeats=repeats)


@dataclass(frozen=True)
class GridPoint:
    params: tuple  # ((name, value), ...) sorted by name
    mean_accuracy: Optional[float]
    mean_f_score: Optional[float]
    mean_auc: Optional[float]
    error: Optional[str]


@dataclass(frozen=True)
class GridSearchResult:
    best_params: dict
    best_hyperparams: Hyperparams
    model: object
    table: tuple  # GridPoint per grid cell


def grid_search(X, y, grid: dict, base: Optional[Hyperparams] = None,
                folds: int = 5, repeats: int = 2, seed: int = 0,
                refit_seed: Optional[int] = None, jobs: int = 1) -> GridSearchResult:
    """Exhaustive search; select max mean F-score, ties by accuracy then params.

    A grid point whose cross-validation fails (e.g. degenerate folds) is
    recorded in the table with its error and skipped.
    """
    if not grid:
        raise TrainingError("grid must contain at least one hyperparameter")
    base = base or Hyperparams()
    names = sorted(grid)
    table = []
    for values in itertools.product(*(grid[n] for n in names)):
        params = tuple(zip(names, values))
        try:
            hp = with_params(base, **dict(params))
            report = repeated_stratified_cv(
                X, y, hp, folds=folds, repeats=repeats, seed=seed, jobs=jobs
            )
            table.append(GridPoint(
                params=params,
                mean_accuracy=report.mean_accuracy,
                mean_f_score=report.mean_f_score,
                mean_auc=report.mean_auc,
                error=None,
            ))
        except (TrainingError, ValueError) as exc:
            table.append(GridPoint(
                params=params, mean_accuracy=None, mean_f_score=None,
                mean_auc=None, error=str(exc),
            ))

    viable = [p for p in table if p.error is None]
    if not viable:
        raise TrainingError("every grid point failed cross-validation")
    # order-free selection: score desc, then accuracy desc, then params asc
    winner = min(
        viable,
        key=lambda p: (-p.mean_f_score, -p.mean_accuracy, p.params),
    )
    best_hp = with_params(base, **dict(winner.params))
    model = train_ensemble(
        X, y, best_hp, seed=refit_seed if refit_seed is not None else seed
    )
    return GridSearchResult(
        best_params=dict(winner.params),
        best_hyperparams=best_hp,
        model=model,
        table=tuple(table),
    )
