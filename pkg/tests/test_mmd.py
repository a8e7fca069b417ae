import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from specmatch.errors import NumericalError, ValidationError
from specmatch.kernels import KernelSpec
from specmatch.mmd import (
    MultiIndex,
    gaussian_moment_expansion_mmd2,
    linear_mmd2,
    logcf_cumulants,
    mmd2_biased,
    moment_expansion_terms,
    permutation_null_quantile,
    weighted_moment,
)


def loop_mmd2(gamma, X, Y):
    def k(a, b):
        return math.exp(-gamma * sum((ai - bi) ** 2 for ai, bi in zip(a, b)))

    n, m = len(X), len(Y)
    sxx = sum(k(a, b) for a in X for b in X)
    syy = sum(k(a, b) for a in Y for b in Y)
    sxy = sum(k(a, b) for a in X for b in Y)
    return sxx / n**2 - 2 * sxy / (n * m) + syy / m**2


def mirrored(rng, n, d, scale):
    half = rng.normal(size=(n // 2, d))
    return scale * np.vstack([half, -half])


def test_identical_sets_give_zero():
    X = np.random.default_rng(0).normal(size=(30, 2))
    assert abs(mmd2_biased(KernelSpec("rbf", gamma=1.0), X, X.copy())) <= 1e-12


def test_singletons_closed_form():
    x, y = np.array([[0.2, 1.0]]), np.array([[-0.3, 0.1]])
    g = 0.7
    expected = 2 - 2 * math.exp(-g * np.sum((x - y) ** 2))
    assert mmd2_biased(KernelSpec("rbf", gamma=g), x, y) == pytest.approx(expected, abs=1e-15)


def test_matches_double_loop_oracle():
    rng = np.random.default_rng(2)
    X = rng.normal(0, 1, size=(50, 1))
    Y = rng.normal(3, 1, size=(50, 1))
    got = mmd2_biased(KernelSpec("rbf", gamma=0.5), X, Y)
    assert abs(got - loop_mmd2(0.5, X.tolist(), Y.tolist())) <= 1e-12


def test_rejects_empty_and_mismatched():
    spec = KernelSpec()
    with pytest.raises(ValidationError):
        mmd2_biased(spec, np.zeros((0, 2)), np.zeros((3, 2)))
    with pytest.raises(ValidationError):
        mmd2_biased(spec, np.zeros((2, 2)), np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        linear_mmd2(np.zeros((0, 2)), np.zeros((3, 2)))


def test_linear_mmd_examples():
    X = np.array([[1.0, 0.0], [1.0, 0.0]])
    Y = np.array([[0.0, 1.0], [0.0, 1.0]])
    assert linear_mmd2(X, X) == 0.0
    assert linear_mmd2(X, Y) == pytest.approx(2.0)


def test_linear_blind_to_variance():
    rng = np.random.default_rng(3)
    X = mirrored(rng, 200, 2, 1.0)
    Y = mirrored(rng, 200, 2, 2.0)
    assert linear_mmd2(X, Y) < 1e-20
    assert mmd2_biased(KernelSpec("rbf", gamma=2.0), X, Y) > 0.01


sample_sets = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(2)),
                     elements=st.floats(-4, 4, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(sample_sets, sample_sets, st.sampled_from(["rbf", "laplace", "linear"]))
def test_symmetric_and_nonnegative(X, Y, kind):
    spec = KernelSpec(kind, gamma=0.8)
    a = mmd2_biased(spec, X, Y)
    b = mmd2_biased(spec, Y, X)
    assert abs(a - b) <= 1e-12
    assert a >= -1e-10


@pytest.mark.parametrize("seed", range(3))
def test_universal_kernel_detects_variance_linear_does_not(seed):
    # at N=M=200 the RBF/null ratio is only ~3-8x, so the 5x margin uses N=M=1000
    rng = np.random.default_rng(seed)
    X = mirrored(rng, 1000, 1, 1.0)
    Y = mirrored(rng, 1000, 1, 2.0)
    spec = KernelSpec("rbf", gamma=2.0)

    def rbf(a, b):
        return mmd2_biased(spec, a, b)

    null95 = permutation_null_quantile(rbf, X, Y, n_perm=100, seed=seed)
    assert rbf(X, Y) > 5 * null95
    lin_null = permutation_null_quantile(linear_mmd2, X, Y, n_perm=100, seed=seed)
    assert not linear_mmd2(X, Y) > 5 * lin_null


@pytest.mark.parametrize("seed", range(3))
def test_universal_kernel_significant_at_200(seed):
    rng = np.random.default_rng(seed)
    X = mirrored(rng, 200, 2, 1.0)
    Y = mirrored(rng, 200, 2, 2.0)
    spec = KernelSpec("rbf", gamma=2.0)

    def rbf(a, b):
        return mmd2_biased(spec, a, b)

    assert rbf(X, Y) > permutation_null_quantile(rbf, X, Y, n_perm=100, seed=seed)


def test_weighted_moment_examples():
    assert weighted_moment([[0.0, 0.0]], MultiIndex((0, 0)), 1.0) == 1.0
    assert weighted_moment([[1.0]], MultiIndex((1,)), 1.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert weighted_moment([[1.0]], (1,), 1.0) == pytest.approx(0.606531, abs=1e-6)


def test_weighted_moment_matches_loop():
    X = np.random.default_rng(5).normal(size=(100, 1))
    sigma = 2.0
    direct = sum(x[0] ** 2 * math.exp(-x[0] ** 2 / (2 * sigma**2)) for x in X) / len(X)
    assert abs(weighted_moment(X, MultiIndex((2,)), sigma) - direct) <= 1e-14


def test_weighted_moment_dimension_check():
    with pytest.raises(ValidationError):
        weighted_moment(np.zeros((3, 2)), MultiIndex((1,)), 1.0)


def test_multi_index_order():
    a = MultiIndex((2, 0, 3))
    assert a.order == 5
    assert a.log_factorial() == pytest.approx(math.log(2 * 6))


def test_expansion_identical_sets():
    X = np.random.default_rng(6).normal(size=(10, 2))
    for order in (0, 3, 8):
        assert gaussian_moment_expansion_mmd2(X, X, 1.5, order) == 0.0


def test_expansion_singletons_match_gram():
    x, y = np.array([[0.0]]), np.array([[1.0]])
    gram = mmd2_biased(KernelSpec("rbf", gamma=0.5), x, y)
    assert gram == pytest.approx(2 - 2 * math.exp(-0.5), abs=1e-15)
    assert abs(gaussian_moment_expansion_mmd2(x, y, 1.0, 12) - gram) <= 1e-4


def test_expansion_monotone_and_converges():
    rng = np.random.default_rng(7)
    X = rng.normal(0, 1, size=(30, 1))
    Y = rng.normal(0.5, 1.5, size=(30, 1))
    sigma = 2.0
    seq = [gaussian_moment_expansion_mmd2(X, Y, sigma, k) for k in range(11)]
    assert all(b >= a for a, b in zip(seq, seq[1:]))
    gram = mmd2_biased(KernelSpec("rbf", gamma=1 / (2 * sigma**2)), X, Y)
    errs = [abs(gram - s) for s in seq]
    assert errs[-1] < errs[0]
    assert errs[-1] <= 1e-3 * gram
    full = gaussian_moment_expansion_mmd2(X, Y, sigma, 40)
    assert full == pytest.approx(gram, rel=1e-9)


def test_expansion_two_dimensional_converges_to_gram():
    rng = np.random.default_rng(8)
    X = rng.uniform(-1, 1, size=(15, 2))
    Y = rng.uniform(-0.5, 1.5, size=(12, 2))
    terms = moment_expansion_terms(X, Y, 1.0, 30)
    assert np.all(terms >= 0)
    gram = mmd2_biased(KernelSpec("rbf", gamma=0.5), X, Y)
    assert terms.sum() == pytest.approx(gram, rel=1e-10)


def test_expansion_limits():
    with pytest.raises(ValidationError):
        gaussian_moment_expansion_mmd2(np.zeros((2, 4)), np.zeros((2, 4)), 1.0, 2)
    with pytest.raises(NumericalError):
        gaussian_moment_expansion_mmd2(np.zeros((2, 1)), np.ones((2, 1)), 1.0, 500)


def test_cumulants_point_mass():
    a = np.array([0.7, -1.2])
    X = np.tile(a, (5, 1))
    mean, cov = logcf_cumulants(X)
    np.testing.assert_allclose(mean, a, atol=1e-8)
    np.testing.assert_allclose(cov, 0.0, atol=1e-6)


def test_cumulants_standard_normal():
    X = np.random.default_rng(9).normal(size=(10_000, 1))
    mean, cov = logcf_cumulants(X, h=1e-3)
    assert abs(mean[0] - X.mean()) <= 0.05
    assert abs(cov[0, 0] - X.var()) <= 0.05


def test_cumulants_correlated_pair():
    rng = np.random.default_rng(10)
    S = np.array([[1.0, 0.6], [0.6, 2.0]])
    X = rng.multivariate_normal([0.5, -0.3], S, size=10_000)
    mean, cov = logcf_cumulants(X)
    sample_cov = np.cov(X.T, bias=True)
    np.testing.assert_allclose(mean, X.mean(axis=0), atol=0.05)
    assert abs(cov[0, 1] - sample_cov[0, 1]) <= 0.05
    np.testing.assert_allclose(cov, sample_cov, atol=0.05)


def test_cumulants_reject_large_step():
    X = np.random.default_rng(11).normal(scale=3.0, size=(500, 1))
    with pytest.raises(NumericalError):
        logcf_cumulants(X, h=2.0)
