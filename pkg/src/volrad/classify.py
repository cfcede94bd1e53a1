"""Linear discriminant analysis with nearest-centroid decisions and leave-one-out evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._io import atomic_write_text, config_comment

__all__ = [
    "LdaModel",
    "ConfusionMatrix",
    "fit_lda",
    "leave_one_out",
    "MethodResult",
    "comparison_table",
    "comparison_csv",
    "compare_methods",
    "METHOD_LABELS",
    "REGULARIZATION",
]

REGULARIZATION = 1e-6


@dataclass(frozen=True, eq=False)
class LdaModel:
    """Discriminant projection (``d x q``) and class centroids in projected space."""

    projection: np.ndarray
    centroids: np.ndarray
    classes: np.ndarray
    eigenvalues: np.ndarray

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def n_components(self) -> int:
        return self.projection.shape[1]

    def transform(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.projection

    def predict(self, x) -> np.ndarray:
        """Class label of the nearest centroid; ties go to the lowest label."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        z = self.transform(x)
        d2 = ((z[:, None, :] - self.centroids[None, :, :]) ** 2).sum(axis=2)
        return self.classes[np.argmin(d2, axis=1)]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray
    classes: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_csv(self, class_names: Optional[Sequence[str]] = None, config: Optional[dict] = None) -> str:
        names = list(class_names) if class_names is not None else [str(c) for c in self.classes]
        lines = []
        if config is not None:
            lines.append(config_comment(config))
        lines.append(",".join(["true\\predicted"] + names))
        for name, row in zip(names, self.counts):
            lines.append(",".join([name] + [str(int(v)) for v in row]))
        return "\n".join(lines) + "\n"

    def write(self, path, class_names=None, config=None) -> None:
        atomic_write_text(path, self.to_csv(class_names, config))


def _validate(x, y) -> tuple[np.ndarray, np.ndarray]:
    try:
        x = np.asarray(x, dtype=np.float64)
    except ValueError as exc:
        raise ValueError("feature vectors must all have the same length") from exc
    y = np.asarray(y)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("features must form an (n_samples, n_features) matrix")
    if len(y) != len(x):
        raise ValueError(f"{len(x)} feature rows but {len(y)} labels")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain NaN or infinite values")
    return x, y


def _sign_fix(vecs: np.ndarray) -> np.ndarray:
    # first clearly nonzero component of every column made positive
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        tol = 1e-12 * np.abs(col).max() if col.size else 0.0
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def fit_lda(x, y, regularization: float = REGULARIZATION) -> LdaModel:
    """Fit LDA on feature rows ``x`` with integer labels ``y``.

    The within-class scatter gets a ridge of ``regularization * trace / d``
    before whitening; the projection keeps ``min(C - 1, d)`` directions
    ordered by decreasing between/within ratio.
    """
    x, y = _validate(x, y)
    classes, inverse, counts = np.unique(y, return_inverse=True, return_counts=True)
    if len(classes) < 2:
        raise ValueError("LDA needs at least 2 classes")
    small = classes[counts < 2]
    if small.size:
        raise ValueError(f"class {small[0]} has fewer than 2 samples")

    n, d = x.shape
    means = np.zeros((len(classes), d))
    np.add.at(means, inverse, x)
    means /= counts[:, None]
    overall = x.mean(axis=0)

    within = x - means[inverse]
    s_w = within.T @ within
    between = (means - overall) * np.sqrt(counts)[:, None]
    s_b = between.T @ between

    tr = np.trace(s_w)
    ridge = regularization * tr / d if tr > 0 else regularization
    s_w = s_w + ridge * np.eye(d)

    lam, u = np.linalg.eigh(s_w)
    whiten = u / np.sqrt(lam)
    m = whiten.T @ s_b @ whiten
    m = 0.5 * (m + m.T)
    mu, v = np.linalg.eigh(m)
    q = min(len(classes) - 1, d)
    order = np.argsort(-mu, kind="stable")[:q]
    proj = _sign_fix(whiten @ v[:, order])
    return LdaModel(proj, means @ proj, classes, mu[order])


def _loo_fold(x, y, i, regularization):
    keep = np.ones(len(y), dtype=bool)
    keep[i] = False
    model = fit_lda(x[keep], y[keep], regularization)
    return model.predict(x[i])[0]


def leave_one_out(
    x, y, regularization: float = REGULARIZATION, workers: int = 1, min_per_class: int = 3
) -> ConfusionMatrix:
    """Refit on ``n - 1`` samples and predict the held-out one, for every sample."""
    x, y = _validate(x, y)
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise ValueError("leave-one-out needs at least 2 classes")
    small = classes[counts < min_per_class]
    if small.size:
        raise ValueError(
            f"class {small[0]} has {counts[classes == small[0]][0]} sample(s); "
            f"leave-one-out needs at least {min_per_class} per class"
        )
    idx = range(len(y))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            preds = list(pool.map(lambda i: _loo_fold(x, y, i, regularization), idx))
    else:
        preds = [_loo_fold(x, y, i, regularization) for i in idx]
    pos = {c: j for j, c in enumerate(classes.tolist())}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for true, pred in zip(y.tolist(), preds):
        cm[pos[true], pos[pred]] += 1
    return ConfusionMatrix(cm, classes)


@dataclass(frozen=True)
class MethodResult:
    method: str
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


def comparison_table(results: Sequence[MethodResult]) -> str:
    """Aligned text table: Method / Images correctly classified / Success rate (%)."""
    head = ("Method", "Images correctly classified", "Success rate (%)")
    body = [(r.method, f"{r.correct}/{r.total}", f"{100 * r.accuracy:.2f}") for r in results]
    widths = [max(len(row[i]) for row in [head] + body) for i in range(3)]
    fmt = lambda row: "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
    rule = "-" * (sum(widths) + 4)
    return "\n".join([rule, fmt(head), rule] + [fmt(r) for r in body] + [rule]) + "\n"


def comparison_csv(results: Sequence[MethodResult], config: Optional[dict] = None) -> str:
    lines = []
    if config is not None:
        lines.append(config_comment(config))
    lines.append("Method,Images correctly classified,Success rate %")
    for r in results:
        lines.append(f"{r.method},{r.correct},{100 * r.accuracy:.2f}")
    return "\n".join(lines) + "\n"


METHOD_LABELS = {
    "glcm": "Co-occurrence matrices",
    "fourier": "Fourier descriptors",
    "gabor": "Gabor filters",
    "vrfd": "Volume-radius signature",
}


def compare_methods(dataset, config, methods: Sequence[str] = ("glcm", "fourier", "gabor", "vrfd")):
    """Leave-one-out accuracy of each method on ``dataset``.

    Returns ``(results, confusions)``: a list of :class:`MethodResult` in the
    order given and a dict of :class:`ConfusionMatrix` keyed by method.
    """
    from .features import dataset_features

    dataset.check_loo()
    results = []
    confusions = {}
    for method in methods:
        x, y = dataset_features(dataset, method, config)
        cm = leave_one_out(x, y, workers=config.workers)
        confusions[method] = cm
        results.append(MethodResult(METHOD_LABELS.get(method, method), cm.correct, cm.total))
    return results, confusions
