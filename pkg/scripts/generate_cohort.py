#!/usr/bin/env python3
"""Build the bundled de-identified cohort snapshot (cohort_snapshot.csv).

The snapshot is a synthetic stand-in for the study's published cohort,
engineered so every structural count matches the published pipeline:

  * 815 raw records: 390 mild / 160 moderate / 84 severe / 181 dead
  * complete-case cleaning leaves 600 records (250/99/81/170) x 33 features
  * biomarker availability 396 / 390 / 305 / 398 for D-dimer, hs-CRP,
    LDH, ferritin; exactly 331 records complete in {D-dimer, hs-CRP,
    ferritin}, composed 100 mild / 48 moderate / 53 severe / 130 dead
  * per-group lab distributions follow the published median/IQR tables

Per-feature "mix" values inject cross-group noise so that trained-model
discrimination lands in the published range rather than saturating.

Usage: python3 scripts/generate_cohort.py [out.csv]
"""

import csv
import math
import sys
from pathlib import Path

import numpy as np

SEED = 20200713  # first admission date in the cohort
Z_IQR = 0.6744897501960817  # quantile of +-25%

GROUPS = ("mild", "moderate", "severe", "dead")
RAW_COUNTS = {"mild": 390, "moderate": 160, "severe": 84, "dead": 181}
CLEAN_COUNTS = {"mild": 250, "moderate": 99, "severe": 81, "dead": 170}
CORE331 = {"mild": 100, "moderate": 48, "severe": 53, "dead": 130}

# interpolation position of each group along the well -> deceased axis
T_BASE = {"mild": -0.15, "moderate": 0.20, "severe": 0.62, "dead": 1.0}
# biomarker anchors span non-severe -> severe-class instead
T_BIO = {"mild": -0.15, "moderate": 0.20, "severe": 0.90, "dead": 1.10}

# name: (family, (median, q1, q3) healthy anchor, (median, q1, q3) sick anchor,
#        cross-group mix, decimals, (clip_lo, clip_hi)[, sigma_scale])
BASE_LABS = {
    "ast_sgot": ("log", (37.1, 26.65, 53.98), (55.1, 36.76, 86.10), 0.40, 2, (5, 900)),
    "alkaline_phosphatase": ("log", (90.64, 71.35, 117.4), (109.77, 83.53, 134.93), 0.35, 2, (20, 800)),
    "direct_bilirubin": ("log", (0.26, 0.20, 0.38), (0.30, 0.21, 0.41), 0.50, 2, (0.05, 9)),
    "lymphocyte_pct": ("log", (23, 15, 31), (9, 5, 15), 0.26, 0, (1, 70)),
    "platelet_count": ("log", (1.52, 1.06, 1.99), (1.85, 1.35, 2.77), 0.50, 2, (0.2, 9)),
    "rbc_count": ("norm", (4.41, 3.96, 4.81), (4.42, 3.98, 4.85), 0.60, 2, (2, 7.5)),
    "sgpt": ("log", (37.65, 21.2, 61.53), (41.38, 21.95, 66.07), 0.55, 2, (4, 900)),
    "serum_potassium": ("norm", (4.47, 4.12, 4.90), (4.50, 4.03, 5.05), 0.60, 2, (2.5, 7.5)),
    "urea": ("log", (25.45, 21.18, 31.08), (48.05, 31.18, 80.88), 0.12, 1, (5, 300)),
    "wbc_count": ("log", (6200, 5100, 7725), (11300, 7200, 17950), 0.24, -2, (1000, 60000)),
    "creatinine": ("log", (1.045, 0.91, 1.26), (1.33, 1.00, 1.68), 0.18, 2, (0.3, 12)),
    "eosinophils_pct": ("log", (2, 1, 3), (1, 1, 2), 0.55, 0, (0, 12)),
    "indirect_bilirubin": ("log", (0.305, 0.21, 0.41), (0.42, 0.28, 0.67), 0.35, 2, (0.05, 9)),
    "mch": ("norm", (28.5, 26.7, 30.5), (28.55, 25.73, 30.98), 0.60, 1, (18, 40)),
    "mcv": ("norm", (88.7, 84.65, 93.73), (88.25, 81.95, 93.33), 0.60, 1, (60, 120)),
    "monocytes_pct": ("log", (7, 4, 10), (4, 2, 6), 0.40, 0, (0, 25)),
    "neutrophils_pct": ("norm", (66, 58, 76), (86, 77.25, 90), 0.26, 1, (15, 98)),
    "serum_sodium": ("norm", (140.65, 137.2, 143.6), (137.75, 133.85, 141.73), 0.35, 1, (115, 162)),
}

BIOMARKERS = {
    "d_dimer": ("log", (354, 241.5, 454.3), (780, 483, 1763.55), 0.05, 0, (50, 30000), 0.65),
    "hs_crp": ("log", (24.75, 6.21, 47.8), (62, 25.98, 94.63), 0.02, 2, (0.2, 600), 0.55),
    "ldh": ("log", (240, 185, 320), (430, 300, 590), 0.35, 0, (80, 3000)),
    "ferritin": ("log", (244, 109.93, 480.68), (544, 260.6, 1196.25), 0.30, 1, (8, 12000)),
}

AGE = ("norm", (50, 41, 63.25), (70, 62, 79), 0.03, 0, (18, 99), 0.9)

# prevalence per group: mild -> dead gradient
COMORBIDITY_PREVALENCE = {
    "cardiac_disease": (0.07, 0.09, 0.13, 0.20),
    "chronic_liver_disease": (0.02, 0.02, 0.03, 0.05),
    "hypertension": (0.24, 0.29, 0.36, 0.45),
    "diabetes": (0.19, 0.24, 0.31, 0.40),
    "chronic_kidney_disease": (0.03, 0.05, 0.08, 0.12),
    "lung_disease": (0.05, 0.06, 0.09, 0.12),
    "morbid_obesity": (0.03, 0.04, 0.05, 0.06),
    "hypothyroidism": (0.05, 0.05, 0.06, 0.08),
}
SYMPTOM_PREVALENCE = {
    "fever": (0.55, 0.66, 0.75, 0.80),
    "cough": (0.48, 0.56, 0.62, 0.65),
    "breathlessness": (0.12, 0.35, 0.68, 0.80),
    "fatigue": (0.30, 0.38, 0.46, 0.52),
    "sore_throat": (0.22, 0.20, 0.17, 0.15),
    "diarrhea": (0.10, 0.11, 0.12, 0.12),
}
MALE_FRACTION = {"mild": 0.56, "moderate": 0.58, "severe": 0.62, "dead": 0.65}

COLUMNS = [
    "patient_id", "age", "gender", "outcome",
    *COMORBIDITY_PREVALENCE,
    *(f"symptom_{s}" for s in SYMPTOM_PREVALENCE),
    "ast_sgot", "alkaline_phosphatase", "direct_bilirubin", "lymphocyte_pct",
    "nl_ratio", "platelet_count", "rbc_count", "sgpt", "serum_potassium",
    "total_bilirubin", "urea", "wbc_count", "basophil_pct", "creatinine",
    "eosinophils_pct", "hematocrit", "hemoglobin", "indirect_bilirubin",
    "mch", "mcv", "monocytes_pct", "neutrophils_pct", "serum_sodium",
    "d_dimer", "hs_crp", "ldh", "ferritin",
]


def _params(family, stats):
    median, q1, q3 = stats
    if family == "log":
        return math.log(median), (math.log(q3) - math.log(q1)) / (2 * Z_IQR)
    return float(median), (q3 - q1) / (2 * Z_IQR)


def _group_params(spec, t):
    family = spec[0]
    sigma_scale = spec[6] if len(spec) > 6 else 1.0
    mu_h, sd_h = _params(family, spec[1])
    mu_s, sd_s = _params(family, spec[2])
    sd = ((1 - t) * sd_h + t * sd_s) * sigma_scale
    return family, (1 - t) * mu_h + t * mu_s, sd


def draw_value(rng, spec, group, t_table):
    family, _, _, mix, decimals, clip = spec[:6]
    # with prob `mix`, sample from a prevalence-weighted random group
    if rng.random() < mix:
        group = rng.choice(GROUPS, p=[RAW_COUNTS[g] / 815 for g in GROUPS])
    fam, mu, sd = _group_params(spec, t_table[group])
    raw = rng.normal(mu, sd)
    value = math.exp(raw) if fam == "log" else raw
    value = min(max(value, clip[0]), clip[1])
    if decimals <= 0:
        scale = 10 ** (-decimals)
        return int(round(value / scale) * scale)
    return round(value, decimals)


def make_patient(rng, group, pid):
    row = {"patient_id": f"P{pid:04d}", "outcome": group}
    row["age"] = draw_value(rng, AGE, group, T_BASE)
    gi = GROUPS.index(group)
    row["gender"] = "M" if rng.random() < MALE_FRACTION[group] else "F"
    for name, prev in COMORBIDITY_PREVALENCE.items():
        row[name] = 1 if rng.random() < prev[gi] else 0
    for name, prev in SYMPTOM_PREVALENCE.items():
        row[f"symptom_{name}"] = 1 if rng.random() < prev[gi] else 0
    for name, spec in BASE_LABS.items():
        row[name] = draw_value(rng, spec, group, T_BASE)
    for name, spec in BIOMARKERS.items():
        row[name] = draw_value(rng, spec, group, T_BIO)
    # physiologic derivations keep the table internally coherent
    lymph = max(1, int(row["lymphocyte_pct"]))
    row["lymphocyte_pct"] = lymph
    row["nl_ratio"] = round(row["neutrophils_pct"] / lymph, 2)
    row["total_bilirubin"] = round(row["direct_bilirubin"] + row["indirect_bilirubin"], 2)
    row["hemoglobin"] = round(min(max(rng.normal(12.4 - 0.05 * gi, 1.9), 6.0), 19.0), 1)
    row["hematocrit"] = round(row["hemoglobin"] * 3.1 + rng.normal(0.0, 1.1), 1)
    row["basophil_pct"] = 1 if rng.random() < 0.12 else 0
    return row


def build_cohort():
    rng = np.random.default_rng(SEED)
    patients = []
    for group in GROUPS:
        for _ in range(RAW_COUNTS[group]):
            patients.append(make_patient(rng, group, len(patients) + 1))

    by_group = {g: [p for p in patients if p["outcome"] == g] for g in GROUPS}
    base_lab_names = [*BASE_LABS, "nl_ratio", "total_bilirubin", "hemoglobin",
                      "hematocrit", "basophil_pct"]

    clean, dirty = [], []
    for group in GROUPS:
        members = by_group[group]
        order = rng.permutation(len(members))
        keep = set(order[: CLEAN_COUNTS[group]].tolist())
        for i, patient in enumerate(members):
            (clean if i in keep else dirty).append(patient)

    # dirty records lose 1-6 random base labs -> complete-case drops them,
    # while per-feature coverage stays far above the cleaning threshold
    for patient in dirty:
        k = int(rng.integers(1, 7))
        for name in rng.choice(base_lab_names, size=k, replace=False):
            patient[name] = None

    # biomarker availability: a 331-patient core holds the winning triple
    core = []
    for group in GROUPS:
        members = [p for p in clean if p["outcome"] == group]
        chosen = rng.choice(len(members), size=CORE331[group], replace=False)
        core.extend(members[i] for i in chosen)
    core_ids = {p["patient_id"] for p in core}

    outside = [p for p in patients if p["patient_id"] not in core_ids]
    order = rng.permutation(len(outside))
    extras_d = {outside[i]["patient_id"] for i in order[:65]}
    extras_h = {outside[i]["patient_id"] for i in order[65:124]}
    extras_f = {outside[i]["patient_id"] for i in order[124:191]}
    ldh_core = {p["patient_id"] for p in
                (core[i] for i in rng.choice(331, size=180, replace=False))}
    ldh_out = {outside[i]["patient_id"] for i in
               rng.choice(len(outside), size=125, replace=False)}

    for patient in patients:
        pid = patient["patient_id"]
        if not (pid in core_ids or pid in extras_d):
            patient["d_dimer"] = None
        if not (pid in core_ids or pid in extras_h):
            patient["hs_crp"] = None
        if not (pid in core_ids or pid in extras_f):
            patient["ferritin"] = None
        if not (pid in ldh_core or pid in ldh_out):
            patient["ldh"] = None

    rng.shuffle(patients)
    return patients


def verify(patients):
    def present(p, name):
        return p[name] is not None

    assert len(patients) == 815
    for name, want in (("d_dimer", 396), ("hs_crp", 390), ("ldh", 305), ("ferritin", 398)):
        got = sum(present(p, name) for p in patients)
        assert got == want, (name, got)
    triple = [p for p in patients
              if present(p, "d_dimer") and present(p, "hs_crp") and present(p, "ferritin")]
    assert len(triple) == 331, len(triple)
    comp = {g: sum(p["outcome"] == g for p in triple) for g in GROUPS}
    assert comp == CORE331, comp
    base_lab_names = [*BASE_LABS, "nl_ratio", "total_bilirubin", "hemoglobin",
                      "hematocrit", "basophil_pct"]
    complete = [p for p in patients if all(present(p, n) for n in base_lab_names)]
    assert len(complete) == 600, len(complete)
    counts = {g: sum(p["outcome"] == g for p in complete) for g in GROUPS}
    assert counts == CLEAN_COUNTS, counts
    assert all(p["outcome"] in GROUPS for p in patients)


def write_csv(patients, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for patient in patients:
            writer.writerow([
                "" if patient.get(c) is None else patient.get(c, "")
                for c in COLUMNS
            ])


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent
        / "src" / "triagekit" / "data" / "cohort_snapshot.csv"
    )
    patients = build_cohort()
    verify(patients)
    write_csv(patients, out)
    print(f"wrote {len(patients)} records to {out}")


if __name__ == "__main__":
    main()
