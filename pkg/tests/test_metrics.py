import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsvrad.metrics import roc_auc, threshold_metrics

from oracles import brute_auc


def test_auc_examples():
    assert roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert roc_auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == 0.0
    assert roc_auc(np.full(10, 0.3), [0, 1] * 5) == 0.5
    assert roc_auc([0.5, 0.5, 0.9, 0.1], [1, 0, 1, 0]) == pytest.approx(brute_auc([0.5, 0.5, 0.9, 0.1], [1, 0, 1, 0]))


def test_auc_errors():
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2], [1, 0, 0])
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2], [2, 0])


labels_st = st.lists(st.integers(0, 1), min_size=2, max_size=40).filter(lambda v: 0 < sum(v) < len(v))


@settings(max_examples=60, deadline=None)
@given(st.data(), labels_st)
def test_auc_matches_pairwise_count(data, labels):
    # a coarse grid of values forces plenty of ties
    scores = data.draw(st.lists(st.integers(-3, 3), min_size=len(labels), max_size=len(labels)))
    assert roc_auc(scores, labels) == pytest.approx(brute_auc(scores, labels), abs=1e-12)
    assert roc_auc(np.negative(scores), labels) == pytest.approx(1 - roc_auc(scores, labels), abs=1e-12)


def test_auc_monotone_invariance(rng):
    scores = rng.normal(size=50)
    labels = rng.integers(0, 2, 50)
    base = roc_auc(scores, labels)
    assert roc_auc(np.exp(scores), labels) == base
    assert roc_auc(3 * scores + 7, labels) == base


def test_nothing_flagged_on_balanced_set():
    m = threshold_metrics(np.zeros(50), np.r_[np.zeros(25), np.ones(25)], tau=1.0)
    assert m.recall == 0.0
    assert m.accuracy == 0.5
    assert m.precision is None and m.f1 is None
    assert m.auc == 0.5
    assert (m.tp, m.fp, m.tn, m.fn) == (0, 0, 25, 25)


def test_mixed_confusion_counts():
    scores = [0.9, 0.8, 0.7, 0.1, 0.0]
    labels = [1, 1, 0, 1, 0]
    m = threshold_metrics(scores, labels, tau=0.5)
    assert (m.tp, m.fp, m.fn, m.tn) == (2, 1, 1, 1)
    assert m.precision == pytest.approx(2 / 3)
    assert m.recall == pytest.approx(2 / 3)
    assert m.f1 == pytest.approx(2 / 3)
    assert m.accuracy == pytest.approx(0.6)
    assert m.total == 5


def test_perfect_classifier():
    m = threshold_metrics([3.0, 2.0, 0.1, 0.2], [1, 1, 0, 0], tau=1.0)
    assert (m.precision, m.recall, m.f1, m.accuracy, m.auc) == (1.0, 1.0, 1.0, 1.0, 1.0)


def test_threshold_is_strict():
    m = threshold_metrics([1.0, 1.0], [1, 0], tau=1.0)
    assert m.tp == 0 and m.fp == 0


def test_f1_undefined_when_precision_and_recall_vanish():
    m = threshold_metrics([2.0, 0.0], [0, 1], tau=1.0)
    assert m.precision == 0.0 and m.recall == 0.0
    assert m.f1 is None


def test_single_class_has_no_auc():
    m = threshold_metrics([0.1, 2.0], [0, 0], tau=1.0)
    assert m.auc is None and m.recall is None


def test_length_mismatch():
    with pytest.raises(ValueError):
        threshold_metrics([0.1, 0.2], [0], tau=0.0)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=1, max_size=30),
    st.data(),
    st.floats(-5, 5),
)
def test_counts_invariant_under_joint_monotone_map(scores, data, tau):
    labels = data.draw(st.lists(st.integers(0, 1), min_size=len(scores), max_size=len(scores)))
    a = threshold_metrics(scores, labels, tau)
    b = threshold_metrics(np.arctan(scores), labels, np.arctan(tau))
    assert (a.tp, a.fp, a.tn, a.fn) == (b.tp, b.fp, b.tn, b.fn)
    assert a.accuracy == (a.tp + a.tn) / a.total
    assert a.total == len(scores)
    assert a.tp + a.fp == int(np.sum(np.asarray(scores) > tau))
