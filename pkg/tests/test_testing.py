import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from screenmin.testing import PValueMatrix, bonferroni_max, screenmin
from screenmin.thresholds import ThresholdSpec

ALPHA = 0.05

matrices = st.integers(1, 60).flatmap(
    lambda m: arrays(float, (m, 2), elements=st.one_of(st.floats(0, 1), st.floats(0, 1e-3))))


def test_navy_default(navy):
    res = screenmin(navy, ThresholdSpec.default(), ALPHA)
    assert navy.m == 149
    assert res.threshold.c == pytest.approx(3.3557e-4, rel=1e-4)
    assert res.n_selected == 13
    assert res.testing_threshold == pytest.approx(0.05 / 13)
    assert round(res.testing_threshold, 4) == 0.0038
    assert res.n_rejected == 0 and len(res.rejected_adjusted) == 0


def test_navy_adaptive(navy):
    res = screenmin(navy, ThresholdSpec.adaptive(), ALPHA)
    assert res.n_selected == 22
    assert res.threshold.c == pytest.approx(2.27e-3, abs=5e-6)
    assert res.testing_threshold == res.threshold.c
    assert res.n_rejected == 0


def test_navy_ids(navy):
    assert navy.ids[-1] == "filler_127"
    assert np.all(navy.pmin[22:] > ALPHA)


def test_all_ones():
    mat = PValueMatrix(np.ones((7, 2)))
    for spec in (ThresholdSpec.default(), ThresholdSpec.adaptive(), ThresholdSpec.fixed(1.0)):
        res = screenmin(mat, spec, ALPHA)
        assert res.n_rejected == 0
    res = screenmin(mat, ThresholdSpec.default(), ALPHA)
    assert res.n_selected == 0 and np.isnan(res.testing_threshold)
    assert np.all(res.adjusted == 1.0)


def test_adjusted_values():
    mat = PValueMatrix.from_columns([0.001, 0.002, 0.3, 0.0001], [0.004, 0.5, 0.001, 0.02])
    res = screenmin(mat, ThresholdSpec.fixed(0.0015), ALPHA)
    np.testing.assert_array_equal(res.selected, [0, 2, 3])
    np.testing.assert_allclose(res.adjusted, [0.012, 1.0, 0.9, 0.06])
    np.testing.assert_array_equal(res.rejected, [0])


def test_bonferroni_examples():
    mat = PValueMatrix.from_columns([0.001, 0.01, 0.2], [0.01, 0.0001, 0.0002])
    res = bonferroni_max(mat, ALPHA)
    np.testing.assert_allclose(res.adjusted, [0.03, 0.03, 0.6])
    np.testing.assert_array_equal(res.rejected, [0, 1])
    assert res.testing_threshold == pytest.approx(ALPHA / 3)


@given(matrices)
def test_rejected_within_selected(p):
    mat = PValueMatrix(p)
    for spec in (ThresholdSpec.default(), ThresholdSpec.adaptive(), ThresholdSpec.fixed(0.01)):
        res = screenmin(mat, spec, ALPHA)
        assert set(res.rejected) <= set(res.selected)
        assert np.all(res.adjusted >= mat.pmax - 1e-15)
        assert np.all((res.adjusted >= 0) & (res.adjusted <= 1))


@given(matrices)
def test_dominates_bonferroni(p):
    mat = PValueMatrix(p)
    bonf = set(bonferroni_max(mat, ALPHA).rejected)
    assert bonf <= set(screenmin(mat, ThresholdSpec.default(), ALPHA).rejected)
    assert bonf <= set(screenmin(mat, ThresholdSpec.fixed(0.2), ALPHA).rejected)


@given(matrices, st.randoms(use_true_random=False))
def test_permutation_equivariance(p, rnd):
    mat = PValueMatrix(p)
    order = list(range(mat.m))
    rnd.shuffle(order)
    perm = mat.take(order)
    for spec in (ThresholdSpec.default(), ThresholdSpec.adaptive()):
        a, b = screenmin(mat, spec, ALPHA), screenmin(perm, spec, ALPHA)
        assert a.threshold.c == b.threshold.c
        np.testing.assert_array_equal(a.adjusted[order], b.adjusted)
        assert sorted(np.asarray(order)[b.rejected]) == sorted(a.rejected)


@given(matrices, st.floats(0.001, 0.5), st.floats(0.001, 0.5))
def test_monotone_in_alpha(p, a1, a2):
    lo, hi = sorted((a1, a2))
    mat = PValueMatrix(p)
    spec = ThresholdSpec.fixed(0.01)
    assert set(screenmin(mat, spec, lo).rejected) <= set(screenmin(mat, spec, hi).rejected)


@settings(max_examples=50)
@given(matrices, st.floats(1e-4, 1.0), st.floats(1e-4, 1.0))
def test_selection_monotone_in_c(p, c1, c2):
    lo, hi = sorted((c1, c2))
    mat = PValueMatrix(p)
    assert set(screenmin(mat, ThresholdSpec.fixed(lo), ALPHA).selected) <= set(
        screenmin(mat, ThresholdSpec.fixed(hi), ALPHA).selected)


def test_matrix_validation():
    with pytest.raises(ValueError):
        PValueMatrix(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        PValueMatrix(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        PValueMatrix(np.array([[0.1, 1.2]]))
    with pytest.raises(ValueError):
        PValueMatrix(np.array([[0.1, np.nan]]))
    with pytest.raises(ValueError):
        PValueMatrix(np.zeros((2, 2)), labels=[0, 3])
    with pytest.raises(ValueError):
        PValueMatrix(np.zeros((2, 2)), ids=["a"])
    with pytest.raises(ValueError):
        PValueMatrix(np.zeros((2, 2))).union_null_mask()
    with pytest.raises(ValueError):
        screenmin(PValueMatrix(np.zeros((2, 2))), ThresholdSpec.default(), 0.0)
    with pytest.raises(ValueError):
        bonferroni_max(PValueMatrix(np.zeros((2, 2))), 1.0)


def test_union_null_mask():
    mat = PValueMatrix(np.zeros((3, 2)), labels=[0, 1, 2])
    np.testing.assert_array_equal(mat.union_null_mask(), [True, True, False])
