import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triagekit.errors import MetricError
from triagekit.metrics import (
    ConfusionMatrix,
    confusion,
    pr_curve,
    roc_curve,
    scalar_metrics,
)

from .oracles import mann_whitney_auc


class TestConfusion:
    def test_hand_count(self):
        cm = confusion([1, 1, 0, 0], [1, 0, 0, 1])
        assert (cm.tp, cm.fn, cm.tn, cm.fp) == (1, 1, 1, 1)

    def test_perfect(self):
        cm = confusion([1, 0, 1], [1, 0, 1])
        assert cm.fp == 0 and cm.fn == 0

    def test_length_mismatch(self):
        with pytest.raises(MetricError):
            confusion([1, 0], [1])

    def test_total_invariant(self):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 2, 50)
        p = rng.integers(0, 2, 50)
        assert confusion(y, p).total == 50


class TestScalarMetrics:
    def test_all_correct(self):
        report = scalar_metrics(ConfusionMatrix(tp=5, fp=0, tn=5, fn=0))
        for value in (report.accuracy, report.precision, report.recall,
                      report.f_score, report.specificity, report.npv):
            assert value == 1.0

    def test_zero_denominator_marks_undefined(self):
        report = scalar_metrics(ConfusionMatrix(tp=0, fp=0, tn=4, fn=0))
        assert report.precision is None
        assert report.recall is None
        assert report.f_score is None
        assert report.accuracy == 1.0

    def test_equal_fp_fn_ties_f_precision_recall(self):
        report = scalar_metrics(ConfusionMatrix(tp=7, fp=3, tn=9, fn=3))
        assert report.precision == report.recall == report.f_score

    def test_round_trip_counts(self):
        cm = ConfusionMatrix(tp=28, fp=5, tn=35, fn=5)
        report = scalar_metrics(cm)
        assert report.recall * (cm.tp + cm.fn) == pytest.approx(cm.tp, abs=1e-9)
        assert report.precision * (cm.tp + cm.fp) == pytest.approx(cm.tp, abs=1e-9)


class TestRocCurve:
    def test_perfect_separation(self):
        curve = roc_curve([1, 1, 0, 0], [0.9, 0.8, 0.3, 0.1])
        assert curve.auc == 1.0

    def test_anti_perfect(self):
        curve = roc_curve([0, 0, 1, 1], [0.9, 0.8, 0.3, 0.1])
        assert curve.auc == 0.0

    def test_endpoints_and_monotonicity(self):
        rng = np.random.default_rng(1)
        y = rng.integers(0, 2, 100)
        s = rng.random(100)
        curve = roc_curve(y, s)
        xs = [p[0] for p in curve.points]
        ys = [p[1] for p in curve.points]
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)
        assert all(b >= a for a, b in zip(xs, xs[1:]))
        assert all(b >= a for a, b in zip(ys, ys[1:]))

    def test_single_class_raises(self):
        with pytest.raises(MetricError):
            roc_curve([1, 1, 1], [0.2, 0.3, 0.4])

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_mann_whitney_with_ties(self, seed):
        rng = np.random.default_rng(seed)
        n = 200
        y = rng.integers(0, 2, n)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        # quantized scores force ties
        s = np.round(rng.random(n), 2)
        curve = roc_curve(y, s)
        assert curve.auc == pytest.approx(mann_whitney_auc(y, s), abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(3)
        y = rng.integers(0, 2, 150)
        y[0], y[1] = 0, 1
        s = rng.random(150)
        a1 = roc_curve(y, s).auc
        a2 = roc_curve(y, np.exp(5 * s)).auc
        assert a1 == pytest.approx(a2, abs=1e-12)


class TestPrCurve:
    def test_perfect_scores(self):
        curve = pr_curve([1, 1, 0, 0], [0.9, 0.8, 0.3, 0.1])
        assert curve.auc == 1.0

    def test_lowest_threshold_hits_prevalence(self):
        y = [1, 0, 0, 0, 1]
        s = [0.9, 0.7, 0.6, 0.4, 0.2]
        curve = pr_curve(y, s)
        recall, precision = curve.points[-1]
        assert recall == 1.0
        assert precision == pytest.approx(2 / 5)

    def test_no_positives_raises(self):
        with pytest.raises(MetricError):
            pr_curve([0, 0, 0], [0.1, 0.5, 0.9])

    def test_auc_between_0_and_1(self):
        rng = np.random.default_rng(4)
        y = rng.integers(0, 2, 80)
        y[0] = 1
        s = rng.random(80)
        assert 0.0 <= pr_curve(y, s).auc <= 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 200), st.integers(0, 200), st.integers(0, 200), st.integers(0, 200))
def test_accuracy_formula(tp, fp, tn, fn):
    if tp + fp + tn + fn == 0:
        return
    report = scalar_metrics(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
    assert report.accuracy == pytest.approx((tp + tn) / (tp + fp + tn + fn))
