import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmdviz import ConfigError, UsageError, fit_pca, project
from cmdviz.reduce import jacobi_eigh, reconstruct

# quadratic-formula eigenvalues of the exact covariance of the pooled memory states
# (covariance entries 19/360, 11/9600, 39/1600)
MEMORY_EIGENVALUES = (0.05282392833965843, 0.024328849438119346)


def two_by_two_eigenvalues(a, b, c):
    mid = (a + c) / 2
    rad = math.sqrt(((a - c) / 2) ** 2 + b * b)
    return mid + rad, mid - rad


def test_memory_pca(memory):
    pooled = memory.pooled()
    assert pooled.shape == (9, 2)
    model = fit_pca(pooled, 2)
    assert model.explained_variance == pytest.approx(MEMORY_EIGENVALUES, abs=1e-9)
    assert model.explained_variance == pytest.approx(
        two_by_two_eigenvalues(19 / 360, 11 / 9600, 39 / 1600), abs=1e-9)


def test_collinear():
    x = np.arange(6.0)
    model = fit_pca(np.column_stack([x, 2 * x]), 1)
    assert model.components[0] == pytest.approx(np.array([1, 2]) / math.sqrt(5), abs=1e-12)
    full = fit_pca(np.column_stack([x, 2 * x]), 2)
    assert full.explained_variance[1] == pytest.approx(0.0, abs=1e-12)


def test_sign_convention():
    x = np.arange(6.0)
    model = fit_pca(np.column_stack([x, -3 * x]), 1)
    row = model.components[0]
    assert row[np.argmax(np.abs(row))] > 0


def test_k_validation():
    with pytest.raises(ConfigError):
        fit_pca(np.ones((5, 2)), 3)
    with pytest.raises(ConfigError):
        fit_pca(np.ones((5, 2)), 0)
    with pytest.raises(UsageError):
        fit_pca(np.ones((1, 2)), 1)


def test_zero_variance_warns():
    with pytest.warns(RuntimeWarning, match="zero variance"):
        model = fit_pca(np.tile([1.0, 2.0, 3.0], (4, 1)), 2)
    assert np.all(model.explained_variance == 0)
    assert np.all(project(model, np.tile([1.0, 2.0, 3.0], (4, 1))) == 0)


def test_project_dimension_mismatch():
    model = fit_pca(np.random.default_rng(0).normal(size=(5, 3)), 2)
    with pytest.raises(UsageError):
        project(model, np.ones((2, 2)))


def test_jacobi_diagonal_and_known():
    vals, vecs = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert sorted(vals) == [1.0, 2.0, 3.0]
    vals, _ = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert sorted(vals) == pytest.approx([1.0, 3.0], abs=1e-14)


matrices = st.tuples(st.integers(2, 30), st.integers(1, 6), st.integers(0, 2**32 - 1))


@settings(max_examples=60)
@given(matrices)
def test_pca_invariants(shape):
    p, n, seed = shape
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(p, n)) * rng.uniform(0.1, 3, n)
    k = min(p, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = fit_pca(x, k)
    c = model.components
    assert np.allclose(c @ c.T, np.eye(k), atol=1e-9)
    assert np.all(np.diff(model.explained_variance) <= 1e-12)
    proj = project(model, x)
    assert np.allclose(proj.mean(axis=0), 0, atol=1e-9)
    var = proj.var(axis=0, ddof=1)
    assert np.allclose(var, model.explained_variance, atol=1e-9)
    if k == n:
        assert np.allclose(reconstruct(model, proj), x, atol=1e-9)
