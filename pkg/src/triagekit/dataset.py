"""Cohort ingestion, cleaning, encoding, balancing, and splitting.

The pipeline never imputes: features with poor coverage are dropped
entirely, then any record still missing a retained feature is dropped
(complete-case). All randomized steps are bit-reproducible given
(input, seed), and all values are immutable after construction.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptyCohortError,
    EncodingError,
    MissingValueError,
    SamplingError,
    SchemaError,
    SplitError,
)

OUTCOMES = ("mild", "moderate", "severe", "dead")
MORTALITY = "mortality"
SEVERITY = "severity"

COMORBIDITIES = (
    "cardiac_disease",
    "chronic_liver_disease",
    "hypertension",
    "diabetes",
    "chronic_kidney_disease",
    "lung_disease",
    "morbid_obesity",
    "hypothyroidism",
)
BIOMARKERS = ("d_dimer", "hs_crp", "ldh", "ferritin")

# Missing-value tokens recognized in CSV cells (case-insensitive).
MISSING_TOKENS = frozenset({"", "na", "nan", "-"})

_TRUE_TOKENS = frozenset({"1", "true", "yes"})
SYMPTOM_PREFIX = "symptom_"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str  # numeric | categorical | biomarker | comorbidity
    unit: str
    display: str


def load_schema(path=None) -> tuple:
    """Parse schema.txt (bundled by default) into FeatureSpec entries."""
    if path is None:
        text = resources.files("triagekit.data").joinpath("schema.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    specs = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise SchemaError(f"bad schema line (expected 4 tab-separated fields): {line!r}")
        specs.append(FeatureSpec(*parts))
    return tuple(specs)


def schema_units(schema=None) -> dict:
    return {s.name: s.unit for s in (schema or load_schema())}


def schema_display(schema=None) -> dict:
    return {s.name: s.display for s in (schema or load_schema())}


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    age: Optional[int]
    gender: Optional[str]  # "M" or "F"
    outcome: str
    labs: dict  # feature name -> float or None
    symptoms: frozenset
    comorbidities: frozenset

    def feature_value(self, name: str):
        """Raw value of a manifest feature, or None when missing."""
        if name == "age":
            return self.age
        if name == "gender":
            return self.gender
        if name in COMORBIDITIES:
            return 1.0 if name in self.comorbidities else 0.0
        if name.startswith(SYMPTOM_PREFIX):
            return 1.0 if name[len(SYMPTOM_PREFIX):] in self.symptoms else 0.0
        return self.labs.get(name)


@dataclass(frozen=True)
class Cohort:
    records: tuple
    feature_manifest: tuple

    @property
    def n_records(self) -> int:
        return len(self.records)

    def outcome_counts(self) -> dict:
        counts = {o: 0 for o in OUTCOMES}
        for r in self.records:
            counts[r.outcome] += 1
        return counts


@dataclass(frozen=True)
class FeatureMatrix:
    X: np.ndarray
    column_names: tuple
    strata: tuple

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.column_names.index(name)]


@dataclass(frozen=True)
class LabelVector:
    labels: np.ndarray
    task: str
    positive_class_name: str


def _parse_float(cell: str) -> Optional[float]:
    token = cell.strip()
    if token.lower() in MISSING_TOKENS:
        return None
    try:
        value = float(token)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _parse_gender(cell: str, row_no: int) -> Optional[str]:
    token = cell.strip().lower()
    if token in MISSING_TOKENS:
        return None
    if token in ("m", "0"):
        return "M"
    if token in ("f", "1"):
        return "F"
    raise SchemaError(f"row {row_no}: unrecognized gender value {cell!r}")


def load_csv(path, schema=None, include_symptoms: bool = False) -> Cohort:
    """Read a cohort CSV into records plus an ordered feature manifest.

    Column names are matched case-insensitively after trimming. Cells that
    do not parse as numbers become missing values, never errors; only
    structural problems (absent columns, invalid outcome/gender/age) raise.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"cohort file not found: {path}")
    specs = load_schema() if schema is None else tuple(schema)
    if specs and isinstance(specs[0], str):
        units = schema_units()
        specs = tuple(
            FeatureSpec(n, "numeric", units.get(n, ""), n) for n in specs
        )
    by_kind = {s.name: s.kind for s in specs}

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        col_index = {}
        for i, raw in enumerate(header):
            col_index.setdefault(raw.strip().lower(), i)

        mandatory = ["age", "gender", "outcome"]
        absent = [c for c in mandatory if c not in col_index]
        if absent:
            raise SchemaError(f"{path}: header lacks mandatory columns: {', '.join(absent)}")
        missing_schema = [s.name for s in specs if s.name.lower() not in col_index]
        if missing_schema:
            raise SchemaError(
                f"{path}: header lacks schema columns: {', '.join(missing_schema)}"
            )

        symptom_cols = [
            (raw.strip().lower(), i)
            for i, raw in enumerate(header)
            if raw.strip().lower().startswith(SYMPTOM_PREFIX)
        ]
        id_col = col_index.get("patient_id")

        records = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue

            def cell(name: str) -> str:
                idx = col_index[name]
                return row[idx] if idx < len(row) else ""

            outcome = cell("outcome").strip().lower()
            if outcome not in OUTCOMES:
                raise SchemaError(f"row {row_no}: outcome must be one of "
                                  f"{OUTCOMES}, got {cell('outcome')!r}")
            age_val = _parse_float(cell("age"))
            if age_val is not None and age_val < 0:
                raise SchemaError(f"row {row_no}: negative age {age_val}")
            gender = _parse_gender(cell("gender"), row_no)

            labs = {}
            comorbs = set()
            for spec in specs:
                if spec.name in ("age", "gender"):
                    continue
                raw = cell(spec.name.lower())
                if spec.kind == "comorbidity":
                    if raw.strip().lower() in _TRUE_TOKENS:
                        comorbs.add(spec.name)
                else:
                    labs[spec.name] = _parse_float(raw)
            symptoms = {
                name[len(SYMPTOM_PREFIX):]
                for name, idx in symptom_cols
                if idx < len(row) and row[idx].strip().lower() in _TRUE_TOKENS
            }
            pid = row[id_col].strip() if id_col is not None and id_col < len(row) else ""
            records.append(PatientRecord(
                patient_id=pid or f"r{row_no - 1:04d}",
                age=int(age_val) if age_val is not None else None,
                gender=gender,
                outcome=outcome,
                labs=labs,
                symptoms=frozenset(symptoms),
                comorbidities=frozenset(comorbs),
            ))

    manifest = [s.name for s in specs]
    if include_symptoms:
        seen = sorted({s for r in records for s in r.symptoms})
        manifest += [SYMPTOM_PREFIX + s for s in seen]
    return Cohort(records=tuple(records), feature_manifest=tuple(manifest))


def _is_missing(record: PatientRecord, feature: str) -> bool:
    return record.feature_value(feature) is None


def drop_missing(cohort: Cohort, feature_min_coverage: float = 0.5,
                 record_policy: bool = True) -> Cohort:
    """Drop poorly-covered features, then (optionally) incomplete records.

    Idempotent: a complete-case cohort passes through unchanged.
    """
    if not 0 <= feature_min_coverage <= 1:
        raise ValueError("feature_min_coverage must be in [0, 1]")
    n = cohort.n_records
    if n == 0:
        raise EmptyCohortError("cohort has no records")

    kept_features = []
    for feat in cohort.feature_manifest:
        present = sum(0 if _is_missing(r, feat) else 1 for r in cohort.records)
        if present / n >= feature_min_coverage:
            kept_features.append(feat)
    if not kept_features:
        raise EmptyCohortError(
            f"no feature reaches coverage {feature_min_coverage}; nothing to model"
        )

    records = cohort.records
    if record_policy:
        records = tuple(
            r for r in records
            if not any(_is_missing(r, f) for f in kept_features)
        )
        if not records:
            raise EmptyCohortError("complete-case filtering removed every record")
    return Cohort(records=records, feature_manifest=tuple(kept_features))


def encode(cohort: Cohort) -> FeatureMatrix:
    """Build the numeric design matrix in manifest column order.

    gender maps to 0 (M) / 1 (F); comorbidity and symptom columns are 0/1;
    lab values are copied verbatim. Requires a cleaned cohort.
    """
    if cohort.n_records == 0:
        raise EmptyCohortError("cannot encode an empty cohort")
    n = cohort.n_records
    d = len(cohort.feature_manifest)
    X = np.empty((n, d), dtype=np.float64)
    for i, record in enumerate(cohort.records):
        for j, feat in enumerate(cohort.feature_manifest):
            value = record.feature_value(feat)
            if value is None:
                raise MissingValueError(
                    f"record {record.patient_id} is missing {feat!r}; "
                    "run drop_missing before encode"
                )
            if feat == "gender":
                if value == "M":
                    X[i, j] = 0.0
                elif value == "F":
                    X[i, j] = 1.0
                else:
                    raise EncodingError(f"unseen gender level {value!r}")
            else:
                X[i, j] = float(value)
    strata = tuple(r.outcome for r in cohort.records)
    return FeatureMatrix(X=X, column_names=tuple(cohort.feature_manifest), strata=strata)


def derive_labels(matrix: FeatureMatrix, task: str) -> LabelVector:
    """Mortality: positive = dead. Severity: positive = severe or dead."""
    if task == MORTALITY:
        labels = np.fromiter(
            (1 if s == "dead" else 0 for s in matrix.strata), dtype=np.int64
        )
        positive = "dead"
    elif task == SEVERITY:
        labels = np.fromiter(
            (1 if s in ("severe", "dead") else 0 for s in matrix.strata), dtype=np.int64
        )
        positive = "severe"
    else:
        raise ValueError(f"unknown task {task!r}")
    return LabelVector(labels=labels, task=task, positive_class_name=positive)


def _subset(matrix: FeatureMatrix, labels: LabelVector, idx: np.ndarray):
    sub = FeatureMatrix(
        X=matrix.X[idx],
        column_names=matrix.column_names,
        strata=tuple(matrix.strata[i] for i in idx),
    )
    lab = LabelVector(
        labels=labels.labels[idx],
        task=labels.task,
        positive_class_name=labels.positive_class_name,
    )
    return sub, lab


def undersample_majority(matrix: FeatureMatrix, labels: LabelVector,
                         per_stratum_targets: dict, seed: int):
    """Downsample each named stratum to its target; keep the rest in full.

    Strata not named in the targets (the minority dead class, normally)
    are preserved exactly. Output row order is a seed-deterministic shuffle.
    """
    strata_arr = np.asarray(matrix.strata)
    rng = np.random.default_rng(seed)
    keep = []
    for name in sorted(per_stratum_targets):
        target = per_stratum_targets[name]
        members = np.nonzero(strata_arr == name)[0]
        if target > members.size:
            raise SamplingError(
                f"stratum {name!r}: target {target} exceeds available {members.size}"
            )
        keep.append(np.sort(rng.choice(members, size=target, replace=False)))
    untouched = np.nonzero(~np.isin(strata_arr, sorted(per_stratum_targets)))[0]
    keep.append(untouched)
    kept = np.sort(np.concatenate(keep))
    shuffled = kept[rng.permutation(kept.size)]
    return _subset(matrix, labels, shuffled)


def _apportion_validation(sizes: dict, val_fraction: float) -> dict:
    """Largest-remainder per-stratum validation counts summing to the total."""
    total = int(math.floor(sum(sizes.values()) * val_fraction + 0.5))
    quotas = {s: n * val_fraction for s, n in sizes.items()}
    counts = {s: int(math.floor(q)) for s, q in quotas.items()}
    # never send a whole stratum to validation
    for s in counts:
        counts[s] = min(counts[s], sizes[s] - 1)
    leftover = total - sum(counts.values())
    order = sorted(sizes, key=lambda s: (-(quotas[s] - math.floor(quotas[s])), s))
    i = 0
    while leftover > 0 and i < 10 * len(order):
        s = order[i % len(order)]
        if counts[s] < sizes[s] - 1:
            counts[s] += 1
            leftover -= 1
        i += 1
    return counts


def stratified_split(matrix: FeatureMatrix, labels: LabelVector,
                     val_fraction: float, seed: int):
    """Per-stratum validation split with largest-remainder apportionment."""
    if not 0 < val_fraction < 1:
        raise SplitError(f"val_fraction must be in (0, 1), got {val_fraction}")
    strata_arr = np.asarray(matrix.strata)
    names = sorted(set(matrix.strata))
    sizes = {s: int(np.sum(strata_arr == s)) for s in names}
    too_small = [s for s, n in sizes.items() if n < 2]
    if too_small:
        raise SplitError(
            "strata too small to appear on both sides of the split: "
            + ", ".join(too_small)
        )
    counts = _apportion_validation(sizes, val_fraction)
    rng = np.random.default_rng(seed)
    val_idx = []
    for s in names:
        members = np.nonzero(strata_arr == s)[0]
        val_idx.append(np.sort(rng.choice(members, size=counts[s], replace=False)))
    val = np.sort(np.concatenate(val_idx)) if val_idx else np.array([], dtype=np.int64)
    train = np.setdiff1d(np.arange(matrix.n_rows), val)
    return _subset(matrix, labels, train), _subset(matrix, labels, val)


def select_biomarker_subset(cohort: Cohort, candidate_biomarkers: Sequence[str],
                            keep: int = 3):
    """Pick the biomarker combination measured for the most records.

    Evaluates every size-``keep`` combination of the candidates, restricts
    the cohort to records complete in the winner, and drops the losing
    candidates from the manifest. Ties break lexicographically.
    """
    for name in candidate_biomarkers:
        if name not in cohort.feature_manifest:
            raise SchemaError(f"candidate biomarker {name!r} not in the manifest")
    best_combo = None
    best_count = -1
    for combo in itertools.combinations(sorted(candidate_biomarkers), keep):
        count = sum(
            1 for r in cohort.records
            if not any(_is_missing(r, f) for f in combo)
        )
        if count > best_count:
            best_count = count
            best_combo = combo
    records = tuple(
        r for r in cohort.records
        if not any(_is_missing(r, f) for f in best_combo)
    )
    manifest = tuple(
        f for f in cohort.feature_manifest
        if f not in candidate_biomarkers or f in best_combo
    )
    return Cohort(records=records, feature_manifest=manifest), best_combo


def restrict_columns(matrix: FeatureMatrix, names: Sequence[str]) -> FeatureMatrix:
    """Project a matrix onto a named column subset (order as given)."""
    idx = []
    for name in names:
        if name not in matrix.column_names:
            raise SchemaError(f"column {name!r} not in matrix")
        idx.append(matrix.column_names.index(name))
    return FeatureMatrix(
        X=matrix.X[:, idx], column_names=tuple(names), strata=matrix.strata
    )


def bundled_cohort_path() -> Path:
    """Path of the cohort snapshot shipped with the package."""
    return Path(resources.files("triagekit.data").joinpath("cohort_snapshot.csv"))


def write_matrix_csv(path, matrix: FeatureMatrix, labels: LabelVector,
                     comments: Optional[dict] = None) -> None:
    """Write a design matrix with stratum/label columns; '#' comment header."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for key, value in (comments or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write(f"# task={labels.task}\n")
        fh.write(f"# positive_class={labels.positive_class_name}\n")
        writer = csv.writer(fh)
        writer.writerow(["stratum", "label", *matrix.column_names])
        for i in range(matrix.n_rows):
            writer.writerow([
                matrix.strata[i],
                int(labels.labels[i]),
                *[repr(v) for v in matrix.X[i].tolist()],
            ])


def read_matrix_csv(path):
    """Read a matrix written by write_matrix_csv back into memory."""
    path = Path(path)
    task = MORTALITY
    positive = "dead"
    rows, strata, labels = [], [], []
    with path.open(newline="", encoding="utf-8") as fh:
        header = None
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("task="):
                    task = body.split("=", 1)[1]
                elif body.startswith("positive_class="):
                    positive = body.split("=", 1)[1]
                continue
            for record in csv.reader([line]):
                if header is None:
                    header = record
                elif record:
                    strata.append(record[0])
                    labels.append(int(record[1]))
                    rows.append([float(v) for v in record[2:]])
    if header is None or not rows:
        raise SchemaError(f"{path}: no data rows")
    matrix = FeatureMatrix(
        X=np.asarray(rows, dtype=np.float64),
        column_names=tuple(header[2:]),
        strata=tuple(strata),
    )
    return matrix, LabelVector(
        labels=np.asarray(labels, dtype=np.int64), task=task,
        positive_class_name=positive,
    )
