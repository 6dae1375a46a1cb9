"""Cohort bias check: Yeo-Johnson de-skewing and k-prototypes clustering.

The power transform is fit per column by maximizing the profile
log-likelihood with golden-section search; transformed columns are
standardized to zero mean, unit sd. Clustering alternates assignment and
prototype updates over mixed numeric/categorical rows, with seeded
restarts keeping the lowest-cost run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ClusterError

LAMBDA_LO = -5.0
LAMBDA_HI = 5.0
LAMBDA_TOL = 1e-6
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def yeo_johnson(x, lam: float):
    """Power transform defined on all reals; strictly increasing in x.

    Powers are evaluated as expm1(k * log1p(.)) so values near zero keep
    full precision instead of collapsing onto 0.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    if abs(lam) < 1e-12:
        out[pos] = np.log1p(x[pos])
    else:
        out[pos] = np.expm1(lam * np.log1p(x[pos])) / lam
    neg = ~pos
    if abs(lam - 2.0) < 1e-12:
        out[neg] = -np.log1p(-x[neg])
    else:
        out[neg] = -np.expm1((2.0 - lam) * np.log1p(-x[neg])) / (2.0 - lam)
    return out if out.ndim else float(out)


def _profile_loglik(column: np.ndarray, lam: float) -> float:
    y = yeo_johnson(column, lam)
    var = float(np.var(y))
    if var <= 0:
        return -np.inf
    n = column.size
    jacobian = float(np.sum(np.sign(column) * np.log1p(np.abs(column))))
    return -0.5 * n * math.log(var) + (lam - 1.0) * jacobian


def _golden_section_max(fn, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


@dataclass(frozen=True)
class PowerColumn:
    name: str
    lam: float
    mean: float
    sd: float

    def apply(self, x):
        return (yeo_johnson(x, self.lam) - self.mean) / self.sd


def fit_power_transform(column, name: str = "") -> PowerColumn:
    """Maximum-likelihood lambda on [-5, 5], plus standardization moments."""
    col = np.asarray(column, dtype=np.float64)
    if not np.isfinite(col).all():
        raise ClusterError(f"column {name!r} contains non-finite values")
    if np.unique(col).size < 3:
        raise ClusterError(
            f"column {name!r} has fewer than 3 distinct values; "
            "cannot fit a power transform"
        )
    lam = _golden_section_max(
        lambda l: _profile_loglik(col, l), LAMBDA_LO, LAMBDA_HI, LAMBDA_TOL
    )
    y = yeo_johnson(col, lam)
    mean = float(np.mean(y))
    sd = float(np.std(y))
    return PowerColumn(name=name, lam=lam, mean=mean, sd=sd)


@dataclass(frozen=True)
class PowerTransform:
    columns: tuple  # PowerColumn per fitted column

    @classmethod
    def fit(cls, X, names=None) -> "PowerTransform":
        X = np.asarray(X, dtype=np.float64)
        names = names or [f"c{i}" for i in range(X.shape[1])]
        return cls(columns=tuple(
            fit_power_transform(X[:, j], str(names[j])) for j in range(X.shape[1])
        ))

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty_like(X)
        for j, col in enumerate(self.columns):
            out[:, j] = col.apply(X[:, j])
        return out


@dataclass(frozen=True)
class ClusterAssignment:
    assignments: np.ndarray  # per-row cluster id
    numeric_centroids: np.ndarray  # k x n_numeric
    categorical_modes: np.ndarray  # k x n_categorical (category codes)
    cost: float
    gamma_mix: float


def default_gamma_mix(X_numeric) -> float:
    """Half the mean numeric column variance (common k-prototypes heuristic)."""
    X_numeric = np.asarray(X_numeric, dtype=np.float64)
    if X_numeric.shape[1] == 0:
        return 1.0
    return 0.5 * float(np.mean(np.var(X_numeric, axis=0)))


def _assign(Xn, Xc, centroids, modes, gamma):
    cost = np.zeros((Xn.shape[0], centroids.shape[0]))
    for c in range(centroids.shape[0]):
        cost[:, c] = np.sum((Xn - centroids[c]) ** 2, axis=1)
        if Xc.shape[1]:
            cost[:, c] += gamma * np.sum(Xc != modes[c], axis=1)
    assignment = np.argmin(cost, axis=1)
    return assignment, float(cost[np.arange(Xn.shape[0]), assignment].sum())


def _column_modes(Xc: np.ndarray) -> np.ndarray:
    modes = np.empty(Xc.shape[1], dtype=np.int64)
    for j in range(Xc.shape[1]):
        vals, counts = np.unique(Xc[:, j], return_counts=True)
        modes[j] = vals[np.argmax(counts)]  # ties: smallest category id
    return modes


def _lloyd(Xn, Xc, k, gamma, init_rows, max_iter):
    centroids = Xn[init_rows].copy()
    modes = Xc[init_rows].copy() if Xc.shape[1] else np.zeros((k, 0), dtype=np.int64)
    assignment, cost = _assign(Xn, Xc, centroids, modes, gamma)
    for _ in range(max_iter):
        for c in range(k):
            members = assignment == c
            if not members.any():
                continue  # empty cluster keeps its prototype
            centroids[c] = Xn[members].mean(axis=0)
            if Xc.shape[1]:
                modes[c] = _column_modes(Xc[members])
        new_assignment, new_cost = _assign(Xn, Xc, centroids, modes, gamma)
        if np.array_equal(new_assignment, assignment):
            assignment, cost = new_assignment, new_cost
            break
        assignment, cost = new_assignment, new_cost
    return assignment, centroids, modes, cost


def kprototypes(matrix, categorical_mask, k: int, gamma_mix=None,
                seed: int = 0, max_iter: int = 100,
                restarts: int = 10) -> ClusterAssignment:
    """Mixed-type Lloyd clustering: squared Euclidean + gamma * mismatches.

    Initialization samples k distinct rows per restart; the lowest-cost
    restart wins (ties to the earliest restart).
    """
    X = np.asarray(matrix, dtype=np.float64)
    if X.ndim != 2:
        raise ClusterError("matrix must be 2-D")
    n = X.shape[0]
    if k > n:
        raise ClusterError(f"k={k} exceeds row count {n}")
    if max_iter < 1:
        raise ClusterError("max_iter must be >= 1")
    mask = np.asarray(categorical_mask, dtype=bool)
    if mask.shape[0] != X.shape[1]:
        raise ClusterError("categorical_mask length must match column count")
    Xn = X[:, ~mask]
    Xc = X[:, mask].astype(np.int64)
    if gamma_mix is None:
        gamma_mix = default_gamma_mix(Xn)

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        init_rows = rng.choice(n, size=k, replace=False)
        result = _lloyd(Xn, Xc, k, gamma_mix, init_rows, max_iter)
        if best is None or result[3] < best[3]:
            best = result
    assignment, centroids, modes, cost = best
    return ClusterAssignment(
        assignments=assignment.astype(np.int64),
        numeric_centroids=centroids,
        categorical_modes=modes,
        cost=cost,
        gamma_mix=float(gamma_mix),
    )


def cluster_label_agreement(assignment: ClusterAssignment, labels):
    """Contingency table and best cluster-to-label matching accuracy."""
    y = np.asarray(getattr(labels, "labels", labels), dtype=np.int64)
    clusters = assignment.assignments
    if y.shape[0] != clusters.shape[0]:
        raise ClusterError("labels and assignments differ in length")
    k = int(clusters.max()) + 1 if clusters.size else 0
    table = np.zeros((2, k), dtype=np.int64)
    for label, cluster in zip(y, clusters):
        table[label, cluster] += 1
    matched = int(np.maximum(table[0], table[1]).sum())
    agreement = matched / y.shape[0] if y.shape[0] else 0.0
    return table, agreement
