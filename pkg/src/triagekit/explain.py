"""Exact SHAP attributions for GBT margins, global rankings, and tree export.

Attributions live in margin (log-odds) space, where Shapley additivity is
exact: base_value + sum(contributions) equals the predicted margin. A
feature's absence is handled by tree-path conditioning: descent weights
follow the share of background rows routed down each side of a split. The
per-tree computation is the polynomial-time path algorithm; summing over
trees gives the ensemble attribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .gbtree import GBTModel, Node


@dataclass(frozen=True)
class ShapExplanation:
    base_value: float
    contributions: np.ndarray
    predicted_margin: float


@dataclass(frozen=True)
class FeatureRanking:
    """(feature name, mean |SHAP|) pairs, descending; ties by name."""

    entries: tuple

    def names(self) -> list:
        return [name for name, _ in self.entries]


class _FlatTree:
    """Array form of one tree: children, thresholds, scaled leaf values."""

    def __init__(self, root: Node, scale: float):
        feats, thrs, lefts, rights, vals = [], [], [], [], []

        def walk(node: Node) -> int:
            idx = len(feats)
            feats.append(node.feature)
            thrs.append(node.threshold)
            lefts.append(-1)
            rights.append(-1)
            vals.append(node.weight * scale if node.is_leaf else 0.0)
            if not node.is_leaf:
                lefts[idx] = walk(node.left)
                rights[idx] = walk(node.right)
            return idx

        walk(root)
        self.feature = np.asarray(feats, dtype=np.int64)
        self.threshold = np.asarray(thrs, dtype=np.float64)
        self.left = np.asarray(lefts, dtype=np.int64)
        self.right = np.asarray(rights, dtype=np.int64)
        self.value = np.asarray(vals, dtype=np.float64)
        self.cover = np.zeros(len(feats), dtype=np.float64)

    def fill_covers(self, X: np.ndarray) -> None:
        def descend(idx: int, rows: np.ndarray) -> None:
            self.cover[idx] = rows.size
            if self.left[idx] < 0:
                return
            mask = X[rows, self.feature[idx]] < self.threshold[idx]
            descend(self.left[idx], rows[mask])
            descend(self.right[idx], rows[~mask])

        descend(0, np.arange(X.shape[0]))

    def expected_value(self) -> float:
        leaves = self.left < 0
        total = self.cover[0]
        if total == 0:
            return 0.0
        return float(np.dot(self.value[leaves], self.cover[leaves]) / total)


def _as_array(data) -> np.ndarray:
    arr = getattr(data, "X", data)
    return np.asarray(arr, dtype=np.float64)


def _shap_one_tree(tree: _FlatTree, x: np.ndarray, phi: np.ndarray) -> None:
    """Path-decomposition Shapley values of one tree added into phi."""
    feature = tree.feature
    threshold = tree.threshold
    left = tree.left
    right = tree.right
    value = tree.value
    cover = tree.cover

    def extend(ds, zs, os, ws, pz, po, pi):
        l = len(ds)
        ds.append(pi)
        zs.append(pz)
        os.append(po)
        ws.append(1.0 if l == 0 else 0.0)
        for i in range(l - 1, -1, -1):
            ws[i + 1] += po * ws[i] * (i + 1) / (l + 1)
            ws[i] = pz * ws[i] * (l - i) / (l + 1)

    def unwind(ds, zs, os, ws, i):
        l = len(ds) - 1
        zi, oi = zs[i], os[i]
        n = ws[l]
        if oi != 0.0:
            for j in range(l - 1, -1, -1):
                t = ws[j]
                ws[j] = n * (l + 1) / ((j + 1) * oi)
                n = t - ws[j] * zi * (l - j) / (l + 1)
        else:
            for j in range(l - 1, -1, -1):
                ws[j] = ws[j] * (l + 1) / (zi * (l - j))
        # recomputed weights occupy the prefix; only d/z/o shift down
        for j in range(i, l):
            ds[j] = ds[j + 1]
            zs[j] = zs[j + 1]
            os[j] = os[j + 1]
        ds.pop()
        zs.pop()
        os.pop()
        ws.pop()

    def unwound_sum(ds, zs, os, ws, i):
        l = len(ds) - 1
        zi, oi = zs[i], os[i]
        total = 0.0
        if oi != 0.0:
            n = ws[l]
            for j in range(l - 1, -1, -1):
                t = n * (l + 1) / ((j + 1) * oi)
                total += t
                n = ws[j] - t * zi * (l - j) / (l + 1)
        else:
            for j in range(l - 1, -1, -1):
                total += ws[j] * (l + 1) / (zi * (l - j))
        return total

    def recurse(node, ds, zs, os, ws, pz, po, pi):
        if pz == 0.0 and po == 0.0 and ds:
            return  # no background mass and off x's path: zero contribution
        ds, zs, os, ws = list(ds), list(zs), list(os), list(ws)
        extend(ds, zs, os, ws, pz, po, pi)
        if left[node] < 0:
            v = value[node]
            for i in range(1, len(ds)):
                w = unwound_sum(ds, zs, os, ws, i)
                phi[ds[i]] += w * (os[i] - zs[i]) * v
            return
        f = feature[node]
        if x[f] < threshold[node]:
            hot, cold = left[node], right[node]
        else:
            hot, cold = right[node], left[node]
        iz, io = 1.0, 1.0
        for k in range(len(ds)):
            if ds[k] == f:
                iz, io = zs[k], os[k]
                unwind(ds, zs, os, ws, k)
                break
        r = cover[node]
        hot_frac = cover[hot] / r if r > 0 else 0.0
        cold_frac = cover[cold] / r if r > 0 else 0.0
        recurse(hot, ds, zs, os, ws, iz * hot_frac, io, f)
        recurse(cold, ds, zs, os, ws, iz * cold_frac, 0.0, f)

    recurse(0, [], [], [], [], 1.0, 1.0, -1)


class TreeShapExplainer:
    """Precomputes background covers once; explains rows cheaply after."""

    def __init__(self, model: GBTModel, background):
        bg = _as_array(background)
        if bg.ndim != 2 or bg.shape[0] == 0:
            raise ShapeError("background dataset must be a non-empty matrix")
        if bg.shape[1] != model.n_features:
            raise ShapeError(
                f"background has {bg.shape[1]} columns, model expects {model.n_features}"
            )
        self.model = model
        eta = model.hyperparams.learning_rate
        self._trees = [_FlatTree(t, eta) for t in model.trees]
        for ft in self._trees:
            ft.fill_covers(bg)
        self.base_value = model.base_margin() + sum(
            ft.expected_value() for ft in self._trees
        )

    def explain_row(self, row) -> ShapExplanation:
        x = np.asarray(row, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.model.n_features:
            raise ShapeError(
                f"expected {self.model.n_features} feature values, got shape {x.shape}"
            )
        phi = np.zeros(self.model.n_features, dtype=np.float64)
        for ft in self._trees:
            _shap_one_tree(ft, x, phi)
        margin = self.base_value + float(phi.sum())
        return ShapExplanation(
            base_value=self.base_value, contributions=phi, predicted_margin=margin
        )

    def explain_matrix(self, data) -> np.ndarray:
        X = _as_array(data)
        out = np.zeros((X.shape[0], self.model.n_features), dtype=np.float64)
        for i in range(X.shape[0]):
            out[i] = self.explain_row(X[i]).contributions
        return out


def tree_shap(model: GBTModel, row, background) -> ShapExplanation:
    return TreeShapExplainer(model, background).explain_row(row)


def mean_abs_shap(model: GBTModel, dataset, background=None) -> FeatureRanking:
    """Mean |SHAP| per feature over a dataset, sorted descending.

    The background defaults to the dataset itself (normally the training
    matrix).
    """
    X = _as_array(dataset)
    if X.shape[0] == 0:
        raise ShapeError("dataset must be non-empty")
    explainer = TreeShapExplainer(model, background if background is not None else X)
    values = explainer.explain_matrix(X)
    means = np.abs(values).mean(axis=0)
    entries = sorted(
        zip(model.feature_names, means.tolist()), key=lambda e: (-e[1], e[0])
    )
    return FeatureRanking(entries=tuple(entries))


def top_k_features(ranking: FeatureRanking, k: int) -> list:
    if k > len(ranking.entries):
        raise ShapeError(f"k={k} exceeds ranking length {len(ranking.entries)}")
    return ranking.names()[:k]


def representative_tree(model: GBTModel):
    """The tree with the greatest total split gain, plus a plot-ready table.

    Returns (tree_index, root node, rows) where each row is a dict with
    keys (node_id, kind, feature, threshold, left_id, right_id, leaf_weight).
    """
    if not model.trees:
        raise ShapeError("model has no trees")
    gains = [t.total_gain() for t in model.trees]
    best = int(np.argmax(gains))
    root = model.trees[best]

    rows = []

    def walk(node: Node) -> int:
        idx = len(rows)
        rows.append(None)
        if node.is_leaf:
            rows[idx] = {
                "node_id": idx, "kind": "leaf", "feature": "",
                "threshold": "", "left_id": "", "right_id": "",
                "leaf_weight": node.weight,
            }
        else:
            left = walk(node.left)
            right = walk(node.right)
            rows[idx] = {
                "node_id": idx, "kind": "split",
                "feature": model.feature_names[node.feature],
                "threshold": node.threshold, "left_id": left,
                "right_id": right, "leaf_weight": "",
            }
        return idx

    walk(root)
    return best, root, rows
