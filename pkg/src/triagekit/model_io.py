"""Versioned text serialization for GBTModel (see MODEL_FORMAT.md).

The on-disk form is JSON: key/value metadata plus one flat node array per
tree. Floats are written with Python's shortest round-trip repr, so a
saved model reloads to bit-identical predictions. The training timestamp
deliberately stays out of the file: identical (data, hyperparams, seed)
must produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ModelFormatError
from .gbtree import GBTModel, Hyperparams, Node, TrainingMeta

FORMAT_NAME = "triagekit-gbt"
FORMAT_VERSION = 1


def _flatten_tree(root: Node) -> list:
    nodes = []

    def walk(node: Node) -> int:
        idx = len(nodes)
        nodes.append(None)
        if node.is_leaf:
            nodes[idx] = {"id": idx, "leaf_weight": node.weight}
        else:
            left = walk(node.left)
            right = walk(node.right)
            nodes[idx] = {
                "id": idx,
                "feature": node.feature,
                "threshold": node.threshold,
                "gain": node.gain,
                "left": left,
                "right": right,
            }
        return idx

    walk(root)
    return nodes


def _build_tree(records: list, n_features: int) -> Node:
    if not records:
        raise ModelFormatError("tree with no nodes")
    by_id = {}
    for rec in records:
        if "id" not in rec:
            raise ModelFormatError(f"node record missing 'id': {rec!r}")
        by_id[int(rec["id"])] = rec

    def build(idx: int) -> Node:
        try:
            rec = by_id[idx]
        except KeyError:
            raise ModelFormatError(f"tree references missing node id {idx}") from None
        if "leaf_weight" in rec:
            return Node(weight=float(rec["leaf_weight"]))
        try:
            feature = int(rec["feature"])
            threshold = float(rec["threshold"])
            left = int(rec["left"])
            right = int(rec["right"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"bad internal node record {rec!r}: {exc}") from None
        if not 0 <= feature < n_features:
            raise ModelFormatError(f"node references invalid feature index {feature}")
        return Node(
            feature=feature,
            threshold=threshold,
            gain=float(rec.get("gain", 0.0)),
            left=build(left),
            right=build(right),
        )

    return build(0)


def model_to_text(model: GBTModel) -> str:
    doc = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "task": model.task,
        "feature_names": list(model.feature_names),
        "hyperparams": model.hyperparams.to_dict(),
        "training_meta": {
            "seed": model.training_meta.seed,
            "data_fingerprint": model.training_meta.data_fingerprint,
            "feature_ranges": {
                k: list(v) for k, v in model.training_meta.feature_ranges.items()
            },
        },
        "trees": [_flatten_tree(t) for t in model.trees],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def save_model(model: GBTModel, path) -> None:
    Path(path).write_text(model_to_text(model), encoding="utf-8")


def model_from_text(text: str) -> GBTModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"malformed model file at line {exc.lineno} column {exc.colno} "
            f"(char {exc.pos}): {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError("not a triagekit model file (missing format tag)")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version!r}; "
            f"this build reads version {FORMAT_VERSION}"
        )
    try:
        feature_names = tuple(str(n) for n in doc["feature_names"])
        hp = Hyperparams.from_dict(doc["hyperparams"])
        meta_doc = doc.get("training_meta", {})
        meta = TrainingMeta(
            seed=int(meta_doc.get("seed", 0)),
            data_fingerprint=str(meta_doc.get("data_fingerprint", "")),
            feature_ranges={
                str(k): (float(v[0]), float(v[1]))
                for k, v in meta_doc.get("feature_ranges", {}).items()
            },
        )
        trees = [_build_tree(t, len(feature_names)) for t in doc["trees"]]
        task = str(doc["task"])
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid model document: {exc}") from None
    return GBTModel(
        trees=trees,
        hyperparams=hp,
        feature_names=feature_names,
        task=task,
        training_meta=meta,
    )


def load_model(path) -> GBTModel:
    p = Path(path)
    if not p.exists():
        raise ModelFormatError(f"model file not found: {p}")
    return model_from_text(p.read_text(encoding="utf-8"))
