"""Second-order gradient-boosted decision trees for binary logistic classification.

Exact greedy split search over every midpoint between consecutive distinct
feature values, L1/L2-regularized leaf weights, gamma split pruning,
min_child_weight admissibility, and per-tree row/column subsampling.
Everything is deterministic given (data, hyperparams, seed).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .errors import ShapeError, TrainingError

MORTALITY = "mortality"
SEVERITY = "severity"

# Sampling streams: NumPy PCG64 via default_rng, seeded with the
# SeedSequence (seed, tree_index) so any single tree can be re-drawn
# without replaying the whole ensemble.


@dataclass(frozen=True)
class Hyperparams:
    """Boosting configuration. Field names follow the usual booster vocabulary."""

    alpha: float = 0.0
    gamma: float = 0.0
    n_estimators: int = 100
    min_child_weight: float = 1.0
    subsample: float = 1.0
    colsample_bytree: float = 1.0
    learning_rate: float = 0.3
    max_depth: int = 6
    lambda_: float = 1.0
    base_score: float = 0.5

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if self.min_child_weight < 0:
            raise ValueError("min_child_weight must be >= 0")
        if not 0 < self.subsample <= 1:
            raise ValueError("subsample must be in (0, 1]")
        if not 0 < self.colsample_bytree <= 1:
            raise ValueError("colsample_bytree must be in (0, 1]")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.lambda_ < 0:
            raise ValueError("lambda_ must be >= 0")
        if not 0 < self.base_score < 1:
            raise ValueError("base_score must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "gamma": self.gamma,
            "n_estimators": self.n_estimators,
            "min_child_weight": self.min_child_weight,
            "subsample": self.subsample,
            "colsample_bytree": self.colsample_bytree,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "lambda": self.lambda_,
            "base_score": self.base_score,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        d = dict(d)
        if "lambda" in d:
            d["lambda_"] = d.pop("lambda")
        return cls(**d)


# Hyperparameter rows published for the two triage tasks.
MORTALITY_HYPERPARAMS = Hyperparams(
    alpha=0.9, gamma=0.8, n_estimators=100, min_child_weight=2,
    subsample=1.0, colsample_bytree=0.7, learning_rate=0.148, max_depth=4,
)
SEVERITY_HYPERPARAMS = Hyperparams(
    alpha=0.1, gamma=3.0, n_estimators=100, min_child_weight=1,
    subsample=0.3, colsample_bytree=1.0, learning_rate=0.3, max_depth=6,
)


@dataclass
class Node:
    """One tree node. ``feature < 0`` marks a leaf.

    Leaves store the unshrunk weight; the learning rate is applied when
    margins are accumulated. Missing values never occur at training time,
    so internal nodes route strictly on ``x[feature] < threshold``
    (the default direction for would-be missing values is fixed to left).
    """

    feature: int = -1
    threshold: float = 0.0
    left: Optional["Node"] = None
    right: Optional["Node"] = None
    weight: float = 0.0
    gain: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def node_count(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + self.left.node_count() + self.right.node_count()

    def total_gain(self) -> float:
        if self.is_leaf:
            return 0.0
        return self.gain + self.left.total_gain() + self.right.total_gain()

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


@dataclass(frozen=True)
class TrainingMeta:
    seed: int
    data_fingerprint: str
    trained_at: str = field(default="", compare=False)
    feature_ranges: dict = field(default_factory=dict)


@dataclass
class GBTModel:
    trees: list
    hyperparams: Hyperparams
    feature_names: tuple
    task: str
    training_meta: TrainingMeta

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def base_margin(self) -> float:
        return logit(self.hyperparams.base_score)


def sigmoid(x):
    # clip keeps exp() finite for extreme margins
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500.0, 500.0)))


def logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def logistic_grad_hess(raw_margin, label):
    """Gradient/hessian of the logistic loss w.r.t. the raw margin.

    p = sigmoid(margin); g = p - label; h = p * (1 - p). Saturates cleanly
    for extreme margins (g -> 0 or +-1, h -> 0) with no overflow.
    """
    p = sigmoid(raw_margin)
    g = p - label
    h = p * (1.0 - p)
    return g, h


def soft_threshold(g: float, alpha: float) -> float:
    if g > alpha:
        return g - alpha
    if g < -alpha:
        return g + alpha
    return 0.0


def leaf_weight(G: float, H: float, hp: Hyperparams) -> float:
    """Optimal leaf weight -soft_threshold(G, alpha) / (H + lambda)."""
    denom = H + hp.lambda_
    if denom <= 0.0:
        raise TrainingError("degenerate leaf: hessian sum + lambda is zero")
    return -soft_threshold(G, hp.alpha) / denom


def split_gain(G_L: float, H_L: float, G_R: float, H_R: float, hp: Hyperparams) -> float:
    """Gamma-penalized second-order gain of a candidate split."""
    lam = hp.lambda_
    return 0.5 * (
        G_L * G_L / (H_L + lam)
        + G_R * G_R / (H_R + lam)
        - (G_L + G_R) ** 2 / (H_L + H_R + lam)
    ) - hp.gamma


def _best_split(X, g, h, rows, cols, hp):
    """Exact greedy search over all (column, midpoint) candidates.

    Returns (gain, col, threshold, left_rows, right_rows) for the best
    admissible split, or None. Ties resolve to the lower column index,
    then the lower threshold: columns are scanned in ascending order with
    a strict improvement test, and within a column argmax takes the first
    (= lowest-threshold) maximum.
    """
    gv = g[rows]
    hv = h[rows]
    G = float(gv.sum())
    H = float(hv.sum())
    lam = hp.lambda_
    if H + lam <= 0.0:
        return None  # fully saturated node with lambda 0: nothing to split
    parent_score = G * G / (H + lam)

    best = None
    best_gain = 0.0
    for c in cols:
        v = X[rows, c]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        # boundaries between consecutive distinct values
        cut = np.nonzero(vs[:-1] != vs[1:])[0]
        if cut.size == 0:
            continue
        thr = (vs[cut] + vs[cut + 1]) / 2.0
        # a midpoint that rounds onto the lower value cannot separate it
        ok = thr > vs[cut]
        cg = np.cumsum(gv[order])
        ch = np.cumsum(hv[order])
        GL = cg[cut]
        HL = ch[cut]
        GR = G - GL
        HR = H - HL
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam)
                           - parent_score) - hp.gamma
        ok &= (HL >= hp.min_child_weight) & (HR >= hp.min_child_weight)
        # zero-hessian children with lambda 0 produce nan/inf: inadmissible
        gains = np.where(ok & np.isfinite(gains), gains, -np.inf)
        i = int(np.argmax(gains))
        if gains[i] > best_gain and gains[i] > 0.0:
            best_gain = float(gains[i])
            left = rows[order[: cut[i] + 1]]
            right = rows[order[cut[i] + 1 :]]
            best = (best_gain, int(c), float(thr[i]), np.sort(left), np.sort(right))
    return best


def train_tree(X, g, h, rows, cols, hp: Hyperparams) -> Node:
    """Grow one tree by exact greedy search on the sampled rows/columns."""
    if len(rows) == 0:
        raise TrainingError("cannot grow a tree from an empty row set")

    def grow(node_rows, depth) -> Node:
        if depth < hp.max_depth:
            found = _best_split(X, g, h, node_rows, cols, hp)
            if found is not None:
                gain, c, thr, left_rows, right_rows = found
                return Node(
                    feature=c,
                    threshold=thr,
                    left=grow(left_rows, depth + 1),
                    right=grow(right_rows, depth + 1),
                    gain=gain,
                )
        G = float(g[node_rows].sum())
        H = float(h[node_rows].sum())
        return Node(weight=leaf_weight(G, H, hp))

    return grow(np.asarray(rows), 0)


def _tree_leaf_weight(node: Node, x) -> float:
    """Scalar descent; much cheaper than array masking for one row."""
    while not node.is_leaf:
        node = node.left if x[node.feature] < node.threshold else node.right
    return node.weight


def _tree_predict(node: Node, X) -> np.ndarray:
    """Unshrunk leaf weights for every row of X (vectorized descent)."""
    if X.shape[0] == 1:
        return np.array([_tree_leaf_weight(node, X[0])])
    out = np.empty(X.shape[0], dtype=np.float64)

    def descend(n: Node, idx):
        if n.is_leaf:
            out[idx] = n.weight
            return
        mask = X[idx, n.feature] < n.threshold
        descend(n.left, idx[mask])
        descend(n.right, idx[~mask])

    descend(node, np.arange(X.shape[0]))
    return out


def _data_fingerprint(X, y) -> str:
    hasher = hashlib.sha256()
    hasher.update(np.ascontiguousarray(X, dtype=np.float64).tobytes())
    hasher.update(np.ascontiguousarray(y, dtype=np.int64).tobytes())
    return hasher.hexdigest()[:16]


def train_ensemble(X, y, hp: Hyperparams, seed: int, feature_names=None,
                   task: str = MORTALITY) -> GBTModel:
    """Newton boosting: n_estimators trees, margins updated by learning_rate."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError(
            f"feature matrix {X.shape} does not align with {y.shape[0]} labels"
        )
    if not np.isfinite(X).all():
        raise TrainingError("training matrix contains non-finite values")
    classes = np.unique(y)
    if classes.size < 2:
        raise TrainingError("training labels contain a single class")
    if seed < 0:
        raise TrainingError("seed must be a non-negative integer")

    n, d = X.shape
    n_sub = max(1, int(math.floor(hp.subsample * n)))
    d_sub = max(1, int(math.floor(hp.colsample_bytree * d)))

    margins = np.full(n, logit(hp.base_score), dtype=np.float64)
    trees = []
    for t in range(hp.n_estimators):
        rng = np.random.default_rng((seed, t))
        rows = np.sort(rng.choice(n, size=n_sub, replace=False))
        cols = np.sort(rng.choice(d, size=d_sub, replace=False))
        g, h = logistic_grad_hess(margins, y)
        tree = train_tree(X, g, h, rows, cols, hp)
        trees.append(tree)
        margins += hp.learning_rate * _tree_predict(tree, X)

    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(d))
    ranges = {
        str(name): (float(X[:, j].min()), float(X[:, j].max()))
        for j, name in enumerate(feature_names)
    }
    meta = TrainingMeta(
        seed=seed,
        data_fingerprint=_data_fingerprint(X, y),
        trained_at=datetime.now(timezone.utc).isoformat(),
        feature_ranges=ranges,
    )
    return GBTModel(
        trees=trees,
        hyperparams=hp,
        feature_names=tuple(str(n) for n in feature_names),
        task=task,
        training_meta=meta,
    )


def _as_matrix(model: GBTModel, row) -> tuple[np.ndarray, bool]:
    arr = np.asarray(row, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != model.n_features:
        raise ShapeError(
            f"expected {model.n_features} feature values, got shape {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise ShapeError("prediction input contains non-finite or missing values")
    return arr, single


def predict_margin(model: GBTModel, row):
    """Raw log-odds margin: logit(base_score) + sum of eta * leaf weights."""
    arr, single = _as_matrix(model, row)
    out = np.full(arr.shape[0], model.base_margin(), dtype=np.float64)
    eta = model.hyperparams.learning_rate
    for tree in model.trees:
        out += eta * _tree_predict(tree, arr)
    return float(out[0]) if single else out


def predict_proba(model: GBTModel, row):
    m = predict_margin(model, row)
    p = sigmoid(np.asarray(m))
    return float(p) if np.ndim(m) == 0 else p


def predict_label(model: GBTModel, row, threshold: float = 0.5):
    p = predict_proba(model, row)
    if np.ndim(p) == 0:
        return int(p >= threshold)
    return (p >= threshold).astype(np.int64)


def mean_logistic_loss(model_margins, y) -> float:
    p = sigmoid(np.asarray(model_margins))
    eps = 1e-15
    p = np.clip(p, eps, 1 - eps)
    y = np.asarray(y, dtype=np.float64)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def staged_margins(X, y, hp: Hyperparams, seed: int):
    """Margins after each boosting round (training diagnostics)."""
    model = train_ensemble(X, y, hp, seed)
    X = np.asarray(X, dtype=np.float64)
    margins = np.full(X.shape[0], model.base_margin())
    stages = [margins.copy()]
    for tree in model.trees:
        margins = margins + hp.learning_rate * _tree_predict(tree, X)
        stages.append(margins.copy())
    return model, stages


def with_params(hp: Hyperparams, **overrides) -> Hyperparams:
    if "lambda" in overrides:
        overrides["lambda_"] = overrides.pop("lambda")
    return replace(hp, **overrides)
