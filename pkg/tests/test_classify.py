import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from volrad.classify import (
    MethodResult,
    comparison_csv,
    comparison_table,
    fit_lda,
    leave_one_out,
)


def _blobs(rng, n_classes=4, per_class=12, d=6, spread=4.0):
    centers = rng.normal(scale=spread, size=(n_classes, d))
    x = np.vstack([c + rng.normal(size=(per_class, d)) for c in centers])
    y = np.repeat(np.arange(n_classes), per_class)
    return x, y


def test_two_1d_classes():
    x = np.array([[0.0], [1.0], [10.0], [11.0]])
    y = np.array([0, 0, 1, 1])
    model = fit_lda(x, y)
    assert model.n_components == 1
    c = model.centroids[:, 0]
    # S_w = 0.5 + 0.5 = 1, so the whitened axis is x itself up to the tiny ridge
    assert abs(c[1] - c[0]) == pytest.approx(10.0, rel=1e-5)
    assert model.predict(x).tolist() == [0, 0, 1, 1]


def test_discriminant_dimension_rank_bound(rng):
    x, y = _blobs(rng, n_classes=5, d=2)
    assert fit_lda(x, y).n_components == 2
    x, y = _blobs(rng, n_classes=3, d=6)
    assert fit_lda(x, y).n_components == 2


def test_projection_solves_generalized_eigenproblem(rng):
    x, y = _blobs(rng)
    model = fit_lda(x, y)
    d = x.shape[1]
    means = np.array([x[y == c].mean(0) for c in range(4)])
    sw = sum((x[y == c] - means[c]).T @ (x[y == c] - means[c]) for c in range(4))
    sw = sw + 1e-6 * np.trace(sw) / d * np.eye(d)
    sb = sum(12 * np.outer(m - x.mean(0), m - x.mean(0)) for m in means)
    ref = scipy.linalg.eigh(sb, sw, eigvals_only=True)[::-1][:3]
    np.testing.assert_allclose(model.eigenvalues, ref, rtol=1e-8)
    for j in range(3):
        w = model.projection[:, j]
        np.testing.assert_allclose(sb @ w, model.eigenvalues[j] * (sw @ w), rtol=1e-6, atol=1e-8)
        assert w[np.flatnonzero(np.abs(w) > 1e-12 * np.abs(w).max())[0]] > 0


def test_predictions_agree_with_sklearn(rng):
    sklearn_lda = pytest.importorskip("sklearn.discriminant_analysis")
    x, y = _blobs(rng, n_classes=4, per_class=15, d=5, spread=1.5)
    test = x + rng.normal(scale=0.8, size=x.shape)
    ours = fit_lda(x, y).predict(test)
    ref = sklearn_lda.LinearDiscriminantAnalysis(solver="eigen").fit(x, y).predict(test)
    assert (ours == ref).mean() >= 0.97


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(0, 10_000))
def test_scaling_invariant_decisions(scale, seed):
    rng = np.random.default_rng(seed)
    x, y = _blobs(rng, spread=2.0)
    probe = rng.normal(scale=3.0, size=(30, x.shape[1]))
    a = fit_lda(x, y).predict(probe)
    b = fit_lda(x * scale, y).predict(probe * scale)
    assert a.tolist() == b.tolist()


def test_rank_deficient_within_scatter(rng):
    x = rng.normal(size=(9, 20))
    y = np.repeat([0, 1, 2], 3)
    model = fit_lda(x, y)
    assert np.all(np.isfinite(model.projection))
    assert model.predict(x).tolist() == y.tolist()


def test_deterministic(rng):
    x, y = _blobs(rng)
    a, b = fit_lda(x, y), fit_lda(x.copy(), y.copy())
    assert a.projection.tobytes() == b.projection.tobytes()


@pytest.mark.parametrize(
    "x, y, match",
    [
        ([[0.0], [1.0], [2.0]], [0, 0, 1], "fewer than 2"),
        ([[0.0], [1.0]], [0, 0], "at least 2 classes"),
        ([[0.0], [np.nan], [1.0], [2.0]], [0, 0, 1, 1], "NaN"),
        ([[0.0], [1.0]], [0, 1, 1], "labels"),
    ],
)
def test_fit_errors(x, y, match):
    with pytest.raises(ValueError, match=match):
        fit_lda(np.array(x), np.array(y))


def test_ragged_features():
    with pytest.raises(ValueError):
        fit_lda([[0.0, 1.0], [1.0]], [0, 1])


def test_loo_separated_1d():
    x = np.array([[0.0], [0.5], [1.0], [10.0], [10.5], [11.0]])
    y = np.array([0, 0, 0, 1, 1, 1])
    cm = leave_one_out(x, y)
    assert cm.accuracy == 1.0
    assert cm.counts.tolist() == [[3, 0], [0, 3]]


def test_loo_identical_features_go_to_class_zero():
    x = np.ones((10, 3))
    y = np.array([0, 0, 0, 0, 1, 1, 1, 2, 2, 2])
    cm = leave_one_out(x, y)
    assert cm.counts[:, 0].tolist() == [4, 3, 3]
    assert cm.accuracy == pytest.approx(0.4)


def test_loo_confusion_invariants(rng):
    x, y = _blobs(rng, n_classes=3, per_class=7, spread=1.0)
    cm = leave_one_out(x, y)
    assert cm.counts.sum(axis=1).tolist() == [7, 7, 7]
    assert cm.accuracy == np.trace(cm.counts) / cm.counts.sum()
    assert leave_one_out(x, y, workers=4).counts.tolist() == cm.counts.tolist()


def test_loo_needs_three_per_class():
    x = np.arange(5.0)[:, None]
    with pytest.raises(ValueError, match="class 1"):
        leave_one_out(x, np.array([0, 0, 0, 1, 1]))


def test_confusion_csv(rng):
    x, y = _blobs(rng, n_classes=2, per_class=4)
    text = leave_one_out(x, y).to_csv(["a", "b"])
    assert text.splitlines()[0] == "true\\predicted,a,b"
    assert len(text.splitlines()) == 3


def test_table_shapes():
    rows = [MethodResult("Co-occurrence matrices", 330, 400), MethodResult("Volume-radius signature", 394, 400)]
    table = comparison_table(rows)
    assert "82.50" in table and "98.50" in table and "394/400" in table
    csv_lines = comparison_csv(rows).splitlines()
    assert csv_lines[0] == "Method,Images correctly classified,Success rate %"
    assert len(csv_lines) == 1 + len(rows)
    assert csv_lines[1] == "Co-occurrence matrices,330,82.50"
