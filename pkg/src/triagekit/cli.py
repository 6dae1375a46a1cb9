"""Command-line pipeline: prepare -> train -> eval -> explain -> reduce -> cluster -> serve.

Flags and artifact names are the tool's contract; see CLI.md. Every
randomized stage derives its own named seed from the master --seed, and
every artifact embeds (tool version, stage seed, config hash) so reruns
with identical inputs are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .cluster import PowerTransform, cluster_label_agreement, kprototypes
from .crossval import grid_search, repeated_stratified_cv
from .dataset import (
    BIOMARKERS,
    MORTALITY,
    SEVERITY,
    derive_labels,
    drop_missing,
    encode,
    load_csv,
    read_matrix_csv,
    restrict_columns,
    select_biomarker_subset,
    stratified_split,
    undersample_majority,
    write_matrix_csv,
)
from .errors import ConfigError, TriageError
from .explain import TreeShapExplainer, mean_abs_shap, representative_tree, top_k_features
from .gbtree import (
    MORTALITY_HYPERPARAMS,
    SEVERITY_HYPERPARAMS,
    Hyperparams,
    predict_proba,
    train_ensemble,
)
from .metrics import confusion, pr_curve, roc_curve, scalar_metrics
from .model_io import load_model, save_model

DEFAULT_UNDERSAMPLE = {"mild": 55, "moderate": 55, "severe": 55}
DEFAULT_VAL_FRACTION = 73 / 375


def stage_seed(master: int, stage: str) -> int:
    """Independent per-stage seed derived from the master seed."""
    digest = hashlib.sha256(f"{master}:{stage}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def provenance(out_dir: Path, command: str, seed: int, config: dict) -> dict:
    meta = {
        "tool_version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "config_hash": config_hash(config),
    }
    (out_dir / "provenance.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8"
    )
    return meta


def artifact_comments(meta: dict) -> dict:
    return {
        "tool_version": meta["tool_version"],
        "seed": meta["seed"],
        "config_hash": meta["config_hash"],
    }


def write_table_csv(path: Path, header, rows, comments: dict) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        for key, value in comments.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def parse_undersample(text: str) -> dict:
    targets = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, value = part.partition("=")
        if not value:
            raise ConfigError(f"bad --undersample entry {part!r}; use stratum=count")
        targets[name.strip()] = int(value)
    return targets


def load_hyperparams(path, task: str) -> Hyperparams:
    if path is None:
        return MORTALITY_HYPERPARAMS if task == MORTALITY else SEVERITY_HYPERPARAMS
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return Hyperparams.from_dict(doc)


@click.group()
@click.version_option(__version__)
def main():
    """Triage model toolkit: data pipeline, boosting, SHAP, evaluation, serving."""


@main.command()
@click.option("--task", type=click.Choice([MORTALITY, SEVERITY]), required=True)
@click.option("--data", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--val-fraction", type=float, default=None,
              help=f"validation fraction (default {DEFAULT_VAL_FRACTION:.4f})")
@click.option("--undersample", "undersample_text", default=None,
              help="per-stratum targets, e.g. mild=55,moderate=55,severe=55 "
                   "(mortality default); 'none' disables undersampling")
@click.option("--feature-min-coverage", type=float, default=0.5, show_default=True)
@click.option("--include-symptoms", is_flag=True, default=False)
def prepare(task, data, out, seed, val_fraction, undersample_text,
            feature_min_coverage, include_symptoms):
    """Clean, encode, balance, and split a cohort CSV into train/val files."""
    out.mkdir(parents=True, exist_ok=True)
    val_fraction = val_fraction if val_fraction is not None else (
        DEFAULT_VAL_FRACTION if task == MORTALITY else 67 / 331
    )
    config = {
        "task": task, "data": str(data), "val_fraction": val_fraction,
        "undersample": undersample_text, "feature_min_coverage": feature_min_coverage,
        "include_symptoms": include_symptoms,
    }
    meta = provenance(out, "prepare", seed, config)

    cohort = load_csv(data, include_symptoms=include_symptoms)
    if task == SEVERITY:
        cohort, combo = select_biomarker_subset(cohort, list(BIOMARKERS), keep=3)
        click.echo(f"biomarker combination: {', '.join(combo)} "
                   f"({cohort.n_records} records)")
    cohort = drop_missing(cohort, feature_min_coverage=feature_min_coverage)
    click.echo(f"cleaned cohort: {cohort.n_records} records x "
               f"{len(cohort.feature_manifest)} features {cohort.outcome_counts()}")
    matrix = encode(cohort)
    labels = derive_labels(matrix, task)

    if task == MORTALITY:
        if undersample_text is None:
            targets = dict(DEFAULT_UNDERSAMPLE)
        elif undersample_text.strip().lower() == "none":
            targets = {}
        else:
            targets = parse_undersample(undersample_text)
        if targets:
            matrix, labels = undersample_majority(
                matrix, labels, targets, seed=stage_seed(seed, "undersample")
            )
            click.echo(f"undersampled to {matrix.n_rows} rows "
                       f"({int(labels.labels.sum())} positive)")

    (train_pair, val_pair) = stratified_split(
        matrix, labels, val_fraction, seed=stage_seed(seed, "split")
    )
    (train_matrix, train_labels) = train_pair
    (val_matrix, val_labels) = val_pair
    comments = artifact_comments(meta)
    write_matrix_csv(out / "train.csv", train_matrix, train_labels, comments)
    write_matrix_csv(out / "val.csv", val_matrix, val_labels, comments)
    click.echo(f"train/val rows: {train_matrix.n_rows}/{val_matrix.n_rows}")
    click.echo(f"wrote {out / 'train.csv'} and {out / 'val.csv'}")


@main.command()
@click.option("--task", type=click.Choice([MORTALITY, SEVERITY]), default=None,
              help="defaults to the task recorded in the training file")
@click.option("--data", type=click.Path(exists=True, path_type=Path), required=True,
              help="prepared train.csv")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--hyperparams", "hyperparams_path",
              type=click.Path(exists=True, path_type=Path), default=None,
              help="JSON hyperparameter file (defaults to the task's published row)")
@click.option("--grid", "grid_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="JSON grid file: {param: [values...]}")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--repeats", type=int, default=2, show_default=True,
              help="CV repeats per grid point")
@click.option("--jobs", type=int, default=1, show_default=True)
def train(task, data, out, seed, hyperparams_path, grid_path, folds, repeats, jobs):
    """Train a boosted ensemble (optionally via grid search) on a prepared split."""
    out.mkdir(parents=True, exist_ok=True)
    matrix, labels = read_matrix_csv(data)
    task = task or labels.task
    config = {
        "task": task, "data": str(data),
        "hyperparams": str(hyperparams_path), "grid": str(grid_path),
        "folds": folds, "repeats": repeats,
    }
    meta = provenance(out, "train", seed, config)
    train_seed = stage_seed(seed, "train")

    if grid_path is not None:
        grid = json.loads(Path(grid_path).read_text(encoding="utf-8"))
        base = load_hyperparams(hyperparams_path, task)
        result = grid_search(
            matrix.X, labels.labels, grid, base=base, folds=folds,
            repeats=repeats, seed=stage_seed(seed, "cv"),
            refit_seed=train_seed, jobs=jobs,
        )
        model = result.model
        hp = result.best_hyperparams
        click.echo(f"grid search winner: {result.best_params}")
        rows = [
            [json.dumps(dict(p.params)), p.mean_f_score, p.mean_accuracy,
             p.mean_auc, p.error or ""]
            for p in result.table
        ]
        write_table_csv(out / "grid_results.csv",
                        ["params", "mean_f_score", "mean_accuracy", "mean_auc", "error"],
                        rows, artifact_comments(meta))
    else:
        hp = load_hyperparams(hyperparams_path, task)
        model = train_ensemble(matrix.X, labels.labels, hp, seed=train_seed,
                               feature_names=matrix.column_names, task=task)

    # the grid-search refit path trains without names; restore them
    model = type(model)(
        trees=model.trees, hyperparams=model.hyperparams,
        feature_names=matrix.column_names, task=task,
        training_meta=model.training_meta,
    )
    save_model(model, out / "model.json")
    probs = predict_proba(model, matrix.X)
    report = scalar_metrics(confusion(labels.labels, (probs >= 0.5).astype(np.int64)))
    log_lines = [
        f"tool_version={__version__}",
        f"seed={train_seed}",
        f"config_hash={meta['config_hash']}",
        f"task={task}",
        f"rows={matrix.n_rows} features={len(matrix.column_names)}",
        f"hyperparams={json.dumps(hp.to_dict(), sort_keys=True)}",
        f"train_accuracy={report.accuracy:.4f}",
    ]
    (out / "training_log.txt").write_text("\n".join(log_lines) + "\n", encoding="utf-8")
    click.echo(f"train accuracy: {report.accuracy:.4f}")
    click.echo(f"wrote {out / 'model.json'}")


@main.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--data", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--threshold", type=float, default=0.5, show_default=True)
def eval_cmd(model_path, data, out, threshold):
    """Score a model on a prepared split: scalar metrics plus ROC/PR curves."""
    out.mkdir(parents=True, exist_ok=True)
    model = load_model(model_path)
    matrix, labels = read_matrix_csv(data)
    if matrix.column_names != model.feature_names:
        matrix = restrict_columns(matrix, model.feature_names)
    config = {"model": str(model_path), "data": str(data), "threshold": threshold}
    meta = provenance(out, "eval", model.training_meta.seed, config)

    probs = predict_proba(model, matrix.X)
    report = scalar_metrics(
        confusion(labels.labels, (probs >= threshold).astype(np.int64))
    )
    roc = roc_curve(labels.labels, probs)
    pr = pr_curve(labels.labels, probs)
    metrics_doc = report.to_dict()
    metrics_doc.update({
        "auc_roc": roc.auc, "auc_prc": pr.auc, "threshold": threshold,
        "rows": matrix.n_rows, **artifact_comments(meta),
    })
    (out / "metrics.json").write_text(
        json.dumps(metrics_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    comments = artifact_comments(meta)
    write_table_csv(
        out / "roc.csv", ["threshold", "fpr", "tpr"],
        [["-inf" if i == 0 else roc.thresholds[i - 1], x, y]
         for i, (x, y) in enumerate(roc.points)],
        comments,
    )
    write_table_csv(
        out / "pr.csv", ["threshold", "recall", "precision"],
        [[t, x, y] for t, (x, y) in zip(pr.thresholds, pr.points)],
        comments,
    )
    click.echo(json.dumps({k: metrics_doc[k] for k in
                           ("accuracy", "recall", "specificity", "auc_roc", "auc_prc")}))
    click.echo(f"wrote metrics and curves under {out}")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--data", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--background", type=click.Path(exists=True, path_type=Path), default=None,
              help="background split (defaults to --data)")
@click.option("--check-local-accuracy", is_flag=True, default=False)
def explain(model_path, data, out, background, check_local_accuracy):
    """Export SHAP values, the global ranking, and the representative tree."""
    out.mkdir(parents=True, exist_ok=True)
    model = load_model(model_path)
    matrix, _ = read_matrix_csv(data)
    if matrix.column_names != model.feature_names:
        matrix = restrict_columns(matrix, model.feature_names)
    bg_matrix = matrix
    if background is not None:
        bg_matrix, _ = read_matrix_csv(background)
        if bg_matrix.column_names != model.feature_names:
            bg_matrix = restrict_columns(bg_matrix, model.feature_names)
    config = {"model": str(model_path), "data": str(data),
              "background": str(background)}
    meta = provenance(out, "explain", model.training_meta.seed, config)
    comments = artifact_comments(meta)

    explainer = TreeShapExplainer(model, bg_matrix.X)
    rows = []
    ranking_sums = np.zeros(model.n_features)
    for i in range(matrix.n_rows):
        exp = explainer.explain_row(matrix.X[i])
        if check_local_accuracy:
            gap = abs(exp.base_value + exp.contributions.sum() - exp.predicted_margin)
            scale = max(1.0, abs(exp.predicted_margin))
            if gap > 1e-9 * scale:
                raise TriageError(f"local accuracy violated on row {i}: gap {gap}")
        ranking_sums += np.abs(exp.contributions)
        for j, name in enumerate(model.feature_names):
            rows.append([i, name, matrix.X[i, j], exp.contributions[j]])
    write_table_csv(out / "shap_values.csv",
                    ["row_id", "feature", "feature_value", "shap_value"],
                    rows, comments)
    (out / "shap_meta.json").write_text(json.dumps({
        "base_value": explainer.base_value,
        "space": "log-odds",
        "rows": matrix.n_rows,
        **comments,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    means = ranking_sums / matrix.n_rows
    order = sorted(zip(model.feature_names, means.tolist()), key=lambda e: (-e[1], e[0]))
    write_table_csv(out / "shap_ranking.csv", ["feature", "mean_abs_shap"],
                    [[n, v] for n, v in order], comments)

    tree_index, _, tree_rows = representative_tree(model)
    write_table_csv(
        out / "representative_tree.csv",
        ["node_id", "kind", "feature", "threshold", "left_id", "right_id", "leaf_weight"],
        [[r["node_id"], r["kind"], r["feature"], r["threshold"],
          r["left_id"], r["right_id"], r["leaf_weight"]] for r in tree_rows],
        {**comments, "tree_index": tree_index},
    )
    click.echo(f"top features: {[n for n, _ in order[:5]]}")
    click.echo(f"wrote SHAP exports under {out}")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--train", "train_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--val", "val_path", type=click.Path(exists=True, path_type=Path),
              default=None)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("-k", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def reduce(model_path, train_path, val_path, out, k, seed):
    """Retrain on the top-k mean-|SHAP| features and report both models."""
    out.mkdir(parents=True, exist_ok=True)
    model = load_model(model_path)
    train_matrix, train_labels = read_matrix_csv(train_path)
    if train_matrix.column_names != model.feature_names:
        train_matrix = restrict_columns(train_matrix, model.feature_names)
    config = {"model": str(model_path), "train": str(train_path),
              "val": str(val_path), "k": k}
    meta = provenance(out, "reduce", seed, config)

    ranking = mean_abs_shap(model, train_matrix.X)
    # resolve ranking names back to this model's columns
    chosen = top_k_features(ranking, min(k, model.n_features))
    (out / "reduced_features.txt").write_text(
        "\n".join(chosen) + "\n", encoding="utf-8"
    )
    reduced_train = restrict_columns(train_matrix, chosen)
    reduced = train_ensemble(
        reduced_train.X, train_labels.labels, model.hyperparams,
        seed=stage_seed(seed, "train"), feature_names=chosen, task=model.task,
    )
    save_model(reduced, out / "model_reduced.json")

    summary = {"k": k, "features": chosen, **artifact_comments(meta)}
    if val_path is not None:
        val_matrix, val_labels = read_matrix_csv(val_path)
        full_val = (restrict_columns(val_matrix, model.feature_names)
                    if val_matrix.column_names != model.feature_names else val_matrix)
        reduced_val = restrict_columns(val_matrix, chosen)
        full_auc = roc_curve(val_labels.labels,
                             predict_proba(model, full_val.X)).auc
        reduced_probs = predict_proba(reduced, reduced_val.X)
        reduced_auc = roc_curve(val_labels.labels, reduced_probs).auc
        reduced_report = scalar_metrics(
            confusion(val_labels.labels, (reduced_probs >= 0.5).astype(np.int64))
        )
        summary.update({
            "full_auc_roc": full_auc,
            "reduced_auc_roc": reduced_auc,
            "auc_gap": abs(full_auc - reduced_auc),
            "reduced_accuracy": reduced_report.accuracy,
        })
        click.echo(f"full AUC {full_auc:.4f} vs reduced AUC {reduced_auc:.4f}")
    (out / "reduced_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(f"wrote reduced model under {out}")


@main.command()
@click.option("--data", type=click.Path(exists=True, path_type=Path), required=True,
              help="prepared split CSV (severity matrix by default in the study)")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-iter", type=int, default=100, show_default=True)
@click.option("--gamma-mix", type=float, default=None,
              help="categorical mismatch weight (default: half mean numeric variance)")
def cluster(data, out, k, seed, max_iter, gamma_mix):
    """Yeo-Johnson transform + k-prototypes clustering with label agreement."""
    out.mkdir(parents=True, exist_ok=True)
    matrix, labels = read_matrix_csv(data)
    config = {"data": str(data), "k": k, "max_iter": max_iter, "gamma_mix": gamma_mix}
    meta = provenance(out, "cluster", seed, config)
    comments = artifact_comments(meta)

    # 0/1 flags (gender, comorbidities, symptoms) and other low-cardinality
    # columns are categorical; everything else gets the power transform
    categorical_mask = np.array([
        np.unique(matrix.X[:, j]).size < 3
        or set(np.unique(matrix.X[:, j])) <= {0.0, 1.0}
        for j in range(matrix.X.shape[1])
    ])
    numeric_names = [n for n, cat in zip(matrix.column_names, categorical_mask) if not cat]
    transform = PowerTransform.fit(matrix.X[:, ~categorical_mask], names=numeric_names)
    transformed = matrix.X.copy()
    transformed[:, ~categorical_mask] = transform.apply(matrix.X[:, ~categorical_mask])
    for j in np.nonzero(categorical_mask)[0]:
        # factorize to dense category codes so Hamming mismatch is exact
        _, transformed[:, j] = np.unique(matrix.X[:, j], return_inverse=True)

    assignment = kprototypes(
        transformed, categorical_mask, k=k, gamma_mix=gamma_mix,
        seed=stage_seed(seed, "cluster"), max_iter=max_iter,
    )
    table, agreement = cluster_label_agreement(assignment, labels)

    write_table_csv(out / "transform_params.csv", ["column", "lambda", "mean", "sd"],
                    [[c.name, c.lam, c.mean, c.sd] for c in transform.columns],
                    comments)
    write_table_csv(out / "assignments.csv", ["row_id", "cluster", "severity_label"],
                    [[i, int(assignment.assignments[i]), int(labels.labels[i])]
                     for i in range(matrix.n_rows)],
                    comments)
    (out / "agreement.json").write_text(json.dumps({
        "contingency": table.tolist(),
        "agreement": agreement,
        "cost": assignment.cost,
        "gamma_mix": assignment.gamma_mix,
        **comments,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"cluster-vs-label agreement: {agreement:.3f}")
    click.echo(f"wrote clustering artifacts under {out}")


@main.command()
@click.option("--data", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--hyperparams", "hyperparams_path",
              type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--task", type=click.Choice([MORTALITY, SEVERITY]), default=None)
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--repeats", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def cv(data, out, hyperparams_path, task, folds, repeats, seed, jobs):
    """Repeated stratified k-fold cross-validation with 95% intervals."""
    out.mkdir(parents=True, exist_ok=True)
    matrix, labels = read_matrix_csv(data)
    task = task or labels.task
    hp = load_hyperparams(hyperparams_path, task)
    config = {"data": str(data), "folds": folds, "repeats": repeats,
              "hyperparams": hp.to_dict()}
    meta = provenance(out, "cv", seed, config)

    report = repeated_stratified_cv(
        matrix.X, labels.labels, hp, folds=folds, repeats=repeats,
        seed=stage_seed(seed, "cv"), jobs=jobs,
    )
    write_table_csv(out / "cv_folds.csv",
                    ["repeat", "fold", "accuracy", "auc_roc", "f_score"],
                    [[s.repeat, s.fold, s.accuracy, s.auc_roc, s.f_score]
                     for s in report.fold_scores],
                    artifact_comments(meta))
    doc = {
        "mean_accuracy": report.mean_accuracy,
        "accuracy_ci95": list(report.accuracy_ci),
        "mean_auc_roc": report.mean_auc,
        "auc_ci95": list(report.auc_ci),
        "folds": folds, "repeats": repeats,
        **artifact_comments(meta),
    }
    (out / "cv_summary.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(f"mean accuracy {report.mean_accuracy:.4f} "
               f"CI ({report.accuracy_ci[0]:.4f}, {report.accuracy_ci[1]:.4f})")
    click.echo(f"mean AUC-ROC {report.mean_auc:.4f} "
               f"CI ({report.auc_ci[0]:.4f}, {report.auc_ci[1]:.4f})")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--input", "input_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="JSON {feature: value} or prepared split CSV")
@click.option("--threshold", type=float, default=0.5, show_default=True)
def predict(model_path, input_path, threshold):
    """Predict probabilities; prints one JSON object per row at full precision."""
    model = load_model(model_path)
    if input_path.suffix == ".json":
        doc = json.loads(input_path.read_text(encoding="utf-8"))
        features = doc.get("features", doc)
        missing = [n for n in model.feature_names if n not in features]
        if missing:
            raise ConfigError(f"input lacks features: {', '.join(missing)}")
        rows = np.array([[float(features[n]) for n in model.feature_names]])
    else:
        matrix, _ = read_matrix_csv(input_path)
        if matrix.column_names != model.feature_names:
            matrix = restrict_columns(matrix, model.feature_names)
        rows = matrix.X
    probs = predict_proba(model, rows)
    for p in np.atleast_1d(probs):
        click.echo(json.dumps({
            "probability": float(p),
            "label": "positive" if p >= threshold else "negative",
            "threshold": threshold,
        }))


@main.command()
@click.option("--model-dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(model_dir, host, port):
    """Serve the loaded models over HTTP (see service module for the API)."""
    from .service import serve as run_service

    run_service(model_dir=model_dir, host=host, port=port)


def entrypoint() -> int:
    try:
        main(standalone_mode=False)
    except TriageError as exc:
        click.echo(f"triagekit: {exc.code}: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 130
    return 0


if __name__ == "__main__":
    sys.exit(entrypoint())
