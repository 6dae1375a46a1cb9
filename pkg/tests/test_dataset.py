import numpy as np
import pytest

from triagekit.dataset import (
    BIOMARKERS,
    Cohort,
    FeatureMatrix,
    PatientRecord,
    derive_labels,
    drop_missing,
    encode,
    load_csv,
    load_schema,
    read_matrix_csv,
    restrict_columns,
    select_biomarker_subset,
    stratified_split,
    undersample_majority,
    write_matrix_csv,
)
from triagekit.errors import (
    EmptyCohortError,
    EncodingError,
    MissingValueError,
    SamplingError,
    SchemaError,
    SplitError,
)


def write_csv(tmp_path, text, name="cohort.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


MINI_SCHEMA = ["age", "gender", "urea", "wbc_count"]

MINI_CSV = """patient_id,age,gender,outcome,urea,wbc_count
p1,50,M,mild,25.0,6000
p2,70,F,dead,48.0,11000
p3,61,M,severe,31.5,9000
"""


class TestLoadCsv:
    def test_three_row_parse(self, tmp_path):
        cohort = load_csv(write_csv(tmp_path, MINI_CSV), schema=MINI_SCHEMA)
        assert cohort.n_records == 3
        assert cohort.feature_manifest == tuple(MINI_SCHEMA)
        rec = cohort.records[0]
        assert rec.patient_id == "p1"
        assert rec.age == 50 and rec.gender == "M" and rec.outcome == "mild"
        assert rec.labs["urea"] == 25.0

    def test_na_cell_becomes_missing(self, tmp_path):
        text = MINI_CSV.replace("25.0", "NA")
        cohort = load_csv(write_csv(tmp_path, text), schema=MINI_SCHEMA)
        assert cohort.records[0].labs["urea"] is None
        assert cohort.n_records == 3

    @pytest.mark.parametrize("token", ["", "na", "NaN", "-", "nan"])
    def test_missing_tokens(self, tmp_path, token):
        text = MINI_CSV.replace("48.0", token)
        cohort = load_csv(write_csv(tmp_path, text), schema=MINI_SCHEMA)
        assert cohort.records[1].labs["urea"] is None

    def test_unparseable_numeric_is_missing_not_error(self, tmp_path):
        text = MINI_CSV.replace("11000", "lost-sample")
        cohort = load_csv(write_csv(tmp_path, text), schema=MINI_SCHEMA)
        assert cohort.records[1].labs["wbc_count"] is None

    def test_missing_outcome_column_is_schema_error(self, tmp_path):
        text = MINI_CSV.replace("outcome", "status")
        with pytest.raises(SchemaError, match="outcome"):
            load_csv(write_csv(tmp_path, text), schema=MINI_SCHEMA)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_csv(tmp_path / "nope.csv", schema=MINI_SCHEMA)

    def test_missing_schema_column_named(self, tmp_path):
        with pytest.raises(SchemaError, match="wbc_count"):
            load_csv(
                write_csv(tmp_path, MINI_CSV.replace("wbc_count", "wbc")),
                schema=MINI_SCHEMA,
            )

    def test_header_case_insensitive(self, tmp_path):
        text = MINI_CSV.replace("age,gender", " AGE ,Gender")
        cohort = load_csv(write_csv(tmp_path, text), schema=MINI_SCHEMA)
        assert cohort.records[0].age == 50

    def test_invalid_outcome_rejected(self, tmp_path):
        with pytest.raises(SchemaError, match="outcome"):
            load_csv(
                write_csv(tmp_path, MINI_CSV.replace("severe", "unknown")),
                schema=MINI_SCHEMA,
            )

    def test_symptom_columns_collected(self, tmp_path):
        text = (
            "age,gender,outcome,urea,wbc_count,symptom_fever\n"
            "50,M,mild,25,6000,1\n"
            "60,F,dead,30,9000,0\n"
        )
        cohort = load_csv(write_csv(tmp_path, text), schema=MINI_SCHEMA)
        assert "fever" in cohort.records[0].symptoms
        assert "fever" not in cohort.records[1].symptoms
        # symptoms stay out of the model manifest unless asked for
        assert all(not f.startswith("symptom_") for f in cohort.feature_manifest)
        with_symptoms = load_csv(
            write_csv(tmp_path, text), schema=MINI_SCHEMA, include_symptoms=True
        )
        assert "symptom_fever" in with_symptoms.feature_manifest


def make_cohort(rows, manifest=("age", "gender", "urea")):
    records = []
    for i, (age, gender, outcome, urea) in enumerate(rows):
        records.append(PatientRecord(
            patient_id=f"p{i}", age=age, gender=gender, outcome=outcome,
            labs={"urea": urea}, symptoms=frozenset(), comorbidities=frozenset(),
        ))
    return Cohort(records=tuple(records), feature_manifest=tuple(manifest))


class TestDropMissing:
    def test_low_coverage_feature_dropped(self):
        rows = [(50, "M", "mild", None)] * 9 + [(60, "F", "dead", 30.0)]
        cohort = make_cohort(rows)
        cleaned = drop_missing(cohort, feature_min_coverage=0.5)
        assert "urea" not in cleaned.feature_manifest
        assert cleaned.n_records == 10

    def test_identity_when_complete(self):
        cohort = make_cohort([(50, "M", "mild", 25.0), (60, "F", "dead", 30.0)])
        cleaned = drop_missing(cohort)
        assert cleaned.records == cohort.records
        assert cleaned.feature_manifest == cohort.feature_manifest

    def test_incomplete_records_dropped(self):
        rows = [(50, "M", "mild", 25.0), (60, "F", "dead", None),
                (55, "M", "severe", 28.0), (70, "F", "dead", 31.0)]
        cleaned = drop_missing(make_cohort(rows))
        assert cleaned.n_records == 3

    def test_idempotent(self):
        rows = [(50, "M", "mild", 25.0), (60, "F", "dead", None),
                (55, "M", "severe", 28.0)]
        once = drop_missing(make_cohort(rows))
        twice = drop_missing(once)
        assert once == twice

    def test_empty_result_raises(self):
        rows = [(None, "M", "mild", None), (None, "F", "dead", None)]
        with pytest.raises(EmptyCohortError):
            drop_missing(make_cohort(rows), feature_min_coverage=0.0)

    def test_bundled_cohort_cleaning_counts(self, bundled_cohort, clean_cohort):
        # the engineered snapshot reproduces the published pipeline exactly
        assert bundled_cohort.n_records == 815
        assert bundled_cohort.outcome_counts() == {
            "mild": 390, "moderate": 160, "severe": 84, "dead": 181,
        }
        assert clean_cohort.n_records == 600
        assert clean_cohort.outcome_counts() == {
            "mild": 250, "moderate": 99, "severe": 81, "dead": 170,
        }
        assert len(clean_cohort.feature_manifest) == 33
        for biomarker in BIOMARKERS:
            assert biomarker not in clean_cohort.feature_manifest


class TestEncode:
    def test_gender_codes(self):
        cohort = make_cohort([(50, "M", "mild", 25.0), (60, "F", "dead", 30.0)])
        matrix = encode(cohort)
        g = matrix.column("gender")
        assert g[0] == 0.0 and g[1] == 1.0

    def test_comorbidity_one_hot(self):
        rec = PatientRecord(
            patient_id="p", age=50, gender="M", outcome="mild", labs={},
            symptoms=frozenset(), comorbidities=frozenset({"diabetes"}),
        )
        from triagekit.dataset import COMORBIDITIES

        cohort = Cohort(records=(rec,), feature_manifest=("age", *COMORBIDITIES))
        matrix = encode(cohort)
        assert matrix.column("diabetes")[0] == 1.0
        for name in COMORBIDITIES:
            if name != "diabetes":
                assert matrix.column(name)[0] == 0.0

    def test_row_order_permutation_invariance(self):
        rows = [(50, "M", "mild", 25.0), (60, "F", "dead", 30.0), (55, "F", "severe", 28.0)]
        m1 = encode(make_cohort(rows))
        m2 = encode(make_cohort(rows[::-1]))
        assert sorted(map(tuple, m1.X.tolist())) == sorted(map(tuple, m2.X.tolist()))

    def test_missing_value_rejected(self):
        with pytest.raises(MissingValueError):
            encode(make_cohort([(50, "M", "mild", None)]))

    def test_unseen_gender_level(self):
        with pytest.raises(EncodingError, match="X"):
            encode(make_cohort([(50, "X", "mild", 25.0)]))

    def test_no_missing_cells_and_binary_columns(self, mortality_matrix):
        matrix, _ = mortality_matrix
        assert np.isfinite(matrix.X).all()
        from triagekit.dataset import COMORBIDITIES

        for name in ("gender", *COMORBIDITIES):
            column = matrix.column(name)
            assert set(np.unique(column)) <= {0.0, 1.0}


class TestDeriveLabels:
    def make_matrix(self, strata):
        n = len(strata)
        return FeatureMatrix(
            X=np.zeros((n, 1)), column_names=("age",), strata=tuple(strata)
        )

    def test_mortality(self):
        labels = derive_labels(self.make_matrix(["mild", "severe", "dead"]), "mortality")
        assert labels.labels.tolist() == [0, 0, 1]
        assert labels.positive_class_name == "dead"

    def test_severity(self):
        labels = derive_labels(self.make_matrix(["mild", "severe", "dead"]), "severity")
        assert labels.labels.tolist() == [0, 1, 1]

    def test_all_mild_all_zero(self):
        for task in ("mortality", "severity"):
            labels = derive_labels(self.make_matrix(["mild"] * 4), task)
            assert labels.labels.sum() == 0


def toy_matrix(strata, d=2, seed=0):
    rng = np.random.default_rng(seed)
    n = len(strata)
    matrix = FeatureMatrix(
        X=rng.normal(size=(n, d)),
        column_names=tuple(f"f{i}" for i in range(d)),
        strata=tuple(strata),
    )
    labels = derive_labels(matrix, "mortality")
    return matrix, labels


class TestUndersample:
    def test_published_targets_on_bundled_cohort(self, mortality_matrix):
        matrix, labels = mortality_matrix
        sub, sub_labels = undersample_majority(
            matrix, labels, {"mild": 55, "moderate": 55, "severe": 55}, seed=0
        )
        counts = {s: sub.strata.count(s) for s in set(sub.strata)}
        assert counts == {"mild": 55, "moderate": 55, "severe": 55, "dead": 170}
        assert int(sub_labels.labels.sum()) == 170
        assert sub.n_rows == 335  # 165 alive + 170 dead

    def test_identity_targets(self):
        strata = ["mild"] * 5 + ["dead"] * 3
        matrix, labels = toy_matrix(strata)
        sub, _ = undersample_majority(matrix, labels, {"mild": 5}, seed=1)
        assert sorted(map(tuple, sub.X.tolist())) == sorted(map(tuple, matrix.X.tolist()))

    def test_seed_reproducibility_and_variation(self):
        strata = ["mild"] * 30 + ["dead"] * 10
        matrix, labels = toy_matrix(strata, seed=3)
        a1, _ = undersample_majority(matrix, labels, {"mild": 10}, seed=7)
        a2, _ = undersample_majority(matrix, labels, {"mild": 10}, seed=7)
        b, _ = undersample_majority(matrix, labels, {"mild": 10}, seed=8)
        assert np.array_equal(a1.X, a2.X)
        assert {s: b.strata.count(s) for s in set(b.strata)} == {"mild": 10, "dead": 10}
        assert sorted(map(tuple, a1.X.tolist())) != sorted(map(tuple, b.X.tolist()))

    def test_rows_unaltered_only_membership(self):
        strata = ["mild"] * 10 + ["dead"] * 4
        matrix, labels = toy_matrix(strata, seed=5)
        sub, _ = undersample_majority(matrix, labels, {"mild": 4}, seed=2)
        originals = set(map(tuple, matrix.X.tolist()))
        for row in sub.X.tolist():
            assert tuple(row) in originals

    def test_target_exceeding_availability(self):
        matrix, labels = toy_matrix(["mild"] * 3 + ["dead"] * 2)
        with pytest.raises(SamplingError, match="mild"):
            undersample_majority(matrix, labels, {"mild": 10}, seed=0)


class TestStratifiedSplit:
    def test_published_mortality_counts(self):
        # 375 rows: 170 dead + 205 alive split 302/73 with 33 dead in validation
        strata = ["mild"] * 85 + ["moderate"] * 60 + ["severe"] * 60 + ["dead"] * 170
        matrix, labels = toy_matrix(strata, seed=11)
        (train, ytr), (val, yva) = stratified_split(matrix, labels, 73 / 375, seed=0)
        assert train.n_rows == 302 and val.n_rows == 73
        assert val.strata.count("dead") == 33
        assert int(ytr.labels.sum()) == 137  # 165 alive + 137 dead in training

    def test_published_severity_counts(self, bundled_cohort):
        sub, _ = select_biomarker_subset(
            bundled_cohort, ["d_dimer", "hs_crp", "ldh", "ferritin"], keep=3
        )
        matrix = encode(drop_missing(sub))
        labels = derive_labels(matrix, "severity")
        (train, ytr), (val, yva) = stratified_split(matrix, labels, 67 / 331, seed=0)
        assert train.n_rows == 264 and val.n_rows == 67
        assert int(yva.labels.sum()) == 37  # severe side of validation
        assert int(ytr.labels.sum()) == 146

    def test_two_strata_half_split(self):
        matrix, labels = toy_matrix(["mild", "mild", "dead", "dead"])
        (train, _), (val, _) = stratified_split(matrix, labels, 0.5, seed=0)
        assert train.n_rows == 2 and val.n_rows == 2
        assert set(train.strata) == {"mild", "dead"}
        assert set(val.strata) == {"mild", "dead"}

    def test_partition_property(self):
        strata = ["mild"] * 21 + ["severe"] * 13 + ["dead"] * 8
        matrix, labels = toy_matrix(strata, seed=2)
        (train, _), (val, _) = stratified_split(matrix, labels, 0.3, seed=4)
        rows = sorted(map(tuple, np.vstack([train.X, val.X]).tolist()))
        assert rows == sorted(map(tuple, matrix.X.tolist()))

    def test_proportions_within_one_row(self):
        strata = ["mild"] * 50 + ["moderate"] * 31 + ["severe"] * 17 + ["dead"] * 29
        matrix, labels = toy_matrix(strata, seed=6)
        fraction = 0.25
        (_, _), (val, _) = stratified_split(matrix, labels, fraction, seed=1)
        for name, size in (("mild", 50), ("moderate", 31), ("severe", 17), ("dead", 29)):
            got = val.strata.count(name)
            assert abs(got - size * fraction) <= 1.0

    def test_small_stratum_rejected(self):
        matrix, labels = toy_matrix(["mild", "mild", "dead"])
        with pytest.raises(SplitError, match="dead"):
            stratified_split(matrix, labels, 0.5, seed=0)


class TestSelectBiomarkerSubset:
    def test_published_availability_pattern(self, bundled_cohort):
        sub, combo = select_biomarker_subset(
            bundled_cohort, ["d_dimer", "hs_crp", "ldh", "ferritin"], keep=3
        )
        assert set(combo) == {"d_dimer", "hs_crp", "ferritin"}
        assert sub.n_records == 331
        assert "ldh" not in sub.feature_manifest
        assert sub.outcome_counts() == {
            "mild": 100, "moderate": 48, "severe": 53, "dead": 130,
        }

    def test_bundled_availability_counts(self, bundled_cohort):
        counts = {
            name: sum(r.labs.get(name) is not None for r in bundled_cohort.records)
            for name in BIOMARKERS
        }
        assert counts == {"d_dimer": 396, "hs_crp": 390, "ldh": 305, "ferritin": 398}

    def test_all_complete_ties_break_lexicographically(self):
        records = tuple(
            PatientRecord(
                patient_id=f"p{i}", age=50, gender="M", outcome="mild",
                labs={"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0},
                symptoms=frozenset(), comorbidities=frozenset(),
            )
            for i in range(4)
        )
        cohort = Cohort(records=records, feature_manifest=("age", "a", "b", "c", "d"))
        _, combo = select_biomarker_subset(cohort, ["a", "b", "c", "d"], keep=3)
        assert combo == ("a", "b", "c")

    def test_fully_missing_biomarker_loses(self):
        records = tuple(
            PatientRecord(
                patient_id=f"p{i}", age=50, gender="M", outcome="mild",
                labs={"a": 1.0, "b": 2.0, "c": 3.0, "d": None},
                symptoms=frozenset(), comorbidities=frozenset(),
            )
            for i in range(4)
        )
        cohort = Cohort(records=records, feature_manifest=("age", "a", "b", "c", "d"))
        sub, combo = select_biomarker_subset(cohort, ["a", "b", "c", "d"], keep=3)
        assert combo == ("a", "b", "c")
        assert sub.n_records == 4

    def test_unknown_candidate_rejected(self, bundled_cohort):
        with pytest.raises(SchemaError):
            select_biomarker_subset(bundled_cohort, ["d_dimer", "nope", "ldh", "ferritin"])


class TestMatrixCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        matrix, labels = toy_matrix(["mild", "dead", "severe"], d=3, seed=9)
        path = tmp_path / "split.csv"
        write_matrix_csv(path, matrix, labels, comments={"seed": 42})
        loaded, loaded_labels = read_matrix_csv(path)
        assert np.array_equal(loaded.X, matrix.X)
        assert loaded.column_names == matrix.column_names
        assert loaded.strata == matrix.strata
        assert np.array_equal(loaded_labels.labels, labels.labels)
        assert loaded_labels.task == labels.task
        assert path.read_text().startswith("# seed=42")

    def test_restrict_columns(self):
        matrix, _ = toy_matrix(["mild", "dead"], d=3)
        sub = restrict_columns(matrix, ["f2", "f0"])
        assert sub.column_names == ("f2", "f0")
        assert np.array_equal(sub.X[:, 1], matrix.X[:, 0])
        with pytest.raises(SchemaError):
            restrict_columns(matrix, ["missing"])


def test_schema_has_33_canonical_plus_biomarkers():
    schema = load_schema()
    canonical = [s for s in schema if s.kind != "biomarker"]
    biomarkers = [s for s in schema if s.kind == "biomarker"]
    assert len(canonical) == 33
    assert [s.name for s in biomarkers] == list(BIOMARKERS)
    assert all(s.unit for s in schema)
