import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxprob.features import (KernelKind, KernelSpec, Standardizer, enrich_rows, enrich_second_order,
                              kernel_feature_rows, kernel_matrix, kernel_value, sample_mean)

from oracles import enrich_reference

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_sample_mean_single_point():
    est = sample_mean([(3.0, -1.0)])
    np.testing.assert_array_equal(est.alpha, [3.0, -1.0])
    np.testing.assert_array_equal(est.spread, [0.0, 0.0])
    assert est.sample_size == 1


def test_sample_mean_pair():
    np.testing.assert_array_equal(sample_mean([(0, 0), (2, 4)]).alpha, [1.0, 2.0])


def test_sample_mean_spread():
    est = sample_mean([(1, 1), (1, 1), (4, 1)])
    np.testing.assert_allclose(est.alpha, [2.0, 1.0])
    np.testing.assert_allclose(est.spread, [math.sqrt(3.0), 0.0])


def test_sample_mean_empty():
    with pytest.raises(ValueError, match="empty labeled sample"):
        sample_mean([])


@pytest.mark.parametrize("x, expected", [
    ([2.0], [2.0, 4.0]),
    ([1.0, 2.0], [1.0, 2.0, 1.0, 2.0, 4.0]),
    ([0.0, 0.0], [0.0] * 5),
])
def test_enrich_examples(x, expected):
    np.testing.assert_array_equal(enrich_second_order(x), expected)


@settings(max_examples=100)
@given(arrays(float, st.integers(1, 6), elements=finite))
def test_enrich_matches_double_loop(x):
    out = enrich_second_order(x)
    n = x.shape[0]
    assert out.shape == (n + n * (n + 1) // 2,)
    np.testing.assert_array_equal(out, enrich_reference(x))


def test_enrich_rows_matches_pointwise():
    X = np.random.default_rng(0).normal(size=(7, 3))
    np.testing.assert_array_equal(enrich_rows(X), np.array([enrich_second_order(x) for x in X]))


def test_kernel_examples():
    rbf = KernelSpec.rbf(1.0)
    assert kernel_value(rbf, [0.3, -2.0], [0.3, -2.0]) == 1.0
    assert kernel_value(KernelSpec.linear(), [1, 0], [0, 1]) == 0.0
    assert kernel_value(rbf, [0, 0], [1, 0]) == pytest.approx(math.exp(-1), abs=1e-15)
    assert kernel_value(KernelSpec.polynomial(3, 1.0), [1, 2], [3, -1]) == pytest.approx(8.0)


def test_kernel_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        kernel_value(KernelSpec.rbf(), [1, 2], [1, 2, 3])


@pytest.mark.parametrize("kwargs", [dict(kind="rbf", gamma=0.0), dict(kind="polynomial", degree=0),
                                    dict(kind="polynomial", degree=1.5)])
def test_kernel_spec_validation(kwargs):
    with pytest.raises(ValueError):
        KernelSpec(**kwargs)


specs = st.sampled_from([KernelSpec.rbf(0.5), KernelSpec.rbf(3.0), KernelSpec.linear(),
                         KernelSpec.polynomial(2, 1.0), KernelSpec.polynomial(3, 0.5)])


@settings(max_examples=100)
@given(specs, arrays(float, 3, elements=finite), arrays(float, 3, elements=finite))
def test_kernel_symmetry(spec, x, y):
    assert kernel_value(spec, x, y) == kernel_value(spec, y, x)


@settings(max_examples=100)
@given(arrays(float, 2, elements=finite), arrays(float, 2, elements=finite))
def test_rbf_range(x, y):
    v = kernel_value(KernelSpec.rbf(0.1), x, y)
    assert 0.0 <= v <= 1.0
    assert (v == 1.0) == bool(np.all(x == y)) or np.allclose(x, y, atol=1e-7)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.sampled_from([KernelKind.RBF, KernelKind.LINEAR]))
def test_gram_is_psd(seed, k, kind):
    X = np.random.default_rng(seed).normal(size=(k, 3))
    G = kernel_matrix(KernelSpec(kind, gamma=0.7), X, X)
    np.testing.assert_array_equal(G, G.T)
    assert np.linalg.eigvalsh(G).min() >= -1e-8


def test_feature_rows_examples():
    pts = np.array([[0.0], [1.0], [2.0]])
    rows = kernel_feature_rows(KernelSpec.rbf(1.0), pts, [0])
    np.testing.assert_allclose(rows, [[1.0, math.exp(-1), math.exp(-4)]], rtol=1e-15)
    same = kernel_feature_rows(KernelSpec.linear(), np.array([[1.0, 2.0], [1.0, 2.0]]), [0, 1])
    assert np.all(same == same[0, 0])
    X = np.random.default_rng(1).normal(size=(5, 2))
    diag = kernel_feature_rows(KernelSpec.rbf(2.0), X, range(5))
    np.testing.assert_array_equal(np.diag(diag), np.ones(5))


def test_feature_rows_agree_with_kernel_value():
    X = np.random.default_rng(2).normal(size=(6, 2))
    spec = KernelSpec.polynomial(2, 1.0)
    rows = kernel_feature_rows(spec, X, [4, 1])
    for r, lm in enumerate([4, 1]):
        for i in range(6):
            assert rows[r, i] == pytest.approx(kernel_value(spec, X[i], X[lm]), rel=1e-12)


def test_feature_rows_bad_index():
    with pytest.raises(IndexError):
        kernel_feature_rows(KernelSpec.rbf(), np.zeros((3, 1)), [3])


def test_standardizer():
    X = np.array([[1.0, 5.0], [3.0, 5.0]])
    Z = Standardizer.fit(X)(X)
    np.testing.assert_allclose(Z, [[-1.0, 0.0], [1.0, 0.0]])
