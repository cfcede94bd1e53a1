"""Volume-radius counting: sphere centers, per-center counts and the mean volume curve.

Centers are drawn with numpy's ``Generator(PCG64(seed)).choice(|S|, N,
replace=False)``. Callers that need to match another implementation
exactly can pass an explicit ``centers`` list instead.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ._io import atomic_write_text, config_comment
from .cloud import HeightField, RadiiGrid

__all__ = [
    "SamplingPlan",
    "VolumeCurve",
    "LogLogCurve",
    "sample_centers",
    "count_within",
    "volume_curve",
    "log_log",
    "curve_to_csv",
    "write_curve",
]

# Padding value for out-of-image window cells; its squared difference to any
# real height exceeds every admissible squared radius.
_FAR = 1 << 30


@dataclass(frozen=True)
class SamplingPlan:
    """How many sphere centers to draw and with which seed.

    Give either ``n_centers`` or ``fraction`` (of the pixel count, rounded up).
    """

    n_centers: Optional[int] = None
    seed: int = 0
    fraction: Optional[float] = None

    def __post_init__(self):
        if (self.n_centers is None) == (self.fraction is None):
            raise ValueError("set exactly one of n_centers or fraction")
        if self.n_centers is not None and self.n_centers < 1:
            raise ValueError(f"n_centers must be >= 1, got {self.n_centers}")
        if self.fraction is not None and not 0 < self.fraction <= 1:
            raise ValueError(f"fraction must lie in (0, 1], got {self.fraction}")

    def resolve(self, n_points: int) -> int:
        if self.n_centers is not None:
            return self.n_centers
        # decimal reading of the float so that 0.1 * 40000 is exactly 4000
        return max(1, math.ceil(Fraction(repr(float(self.fraction))) * n_points))


@dataclass(frozen=True, eq=False)
class VolumeCurve:
    grid: RadiiGrid
    v: np.ndarray
    n_centers: int
    seed: Optional[int]
    width: int = 0
    height: int = 0

    @property
    def totals(self) -> np.ndarray:
        """Integer sums of the per-center counts (``v * n_centers``)."""
        return np.rint(self.v * self.n_centers).astype(np.int64)


@dataclass(frozen=True, eq=False)
class LogLogCurve:
    lr: np.ndarray
    lv: np.ndarray

    def __len__(self) -> int:
        return len(self.lr)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.lr, self.lv])


def sample_centers(field: HeightField, plan: SamplingPlan) -> np.ndarray:
    """Distinct row-major pixel indices drawn uniformly without replacement."""
    n_points = field.size
    n = plan.resolve(n_points)
    if n > n_points:
        raise ValueError(f"cannot draw {n} distinct centers from {n_points} points")
    rng = np.random.Generator(np.random.PCG64(plan.seed))
    return rng.choice(n_points, size=n, replace=False).astype(np.int64)


def _window_offsets(r_max: int):
    d = np.arange(-r_max, r_max + 1)
    dy, dx = np.meshgrid(d, d, indexing="ij")
    dxy = dx * dx + dy * dy
    keep = dxy <= r_max * r_max
    return dy[keep], dx[keep], dxy[keep]


def _histogram(field: HeightField, centers: np.ndarray, r_max: int) -> np.ndarray:
    """Summed histogram of squared distances ``0..r_max**2`` from all centers."""
    max_sq = r_max * r_max
    zp = np.pad(field.z, r_max, mode="constant", constant_values=_FAR)
    row = zp.shape[1]
    flat_z = zp.ravel()
    cy, cx = np.divmod(np.asarray(centers, dtype=np.int64), field.width)
    base = (cy + r_max) * row + (cx + r_max)
    zc = flat_z[base]
    hist = np.zeros(max_sq + 1, dtype=np.int64)
    for dy, dx, dxy in zip(*_window_offsets(r_max)):
        dz = flat_z.take(base + (dy * row + dx)) - zc
        d2 = dz * dz + dxy
        d2 = d2[d2 <= max_sq]
        if d2.size:
            hist += np.bincount(d2, minlength=max_sq + 1)
    return hist


def count_within(field: HeightField, center: int, grid: RadiiGrid) -> np.ndarray:
    """Number of points within each grid radius of one center (center included)."""
    if not 0 <= center < field.size:
        raise IndexError(f"center {center} outside [0, {field.size})")
    hist = _histogram(field, np.array([center]), grid.r_max)
    return np.cumsum(hist)[grid.sq_dists]


def volume_curve(
    field: HeightField,
    plan: Optional[SamplingPlan],
    grid: RadiiGrid,
    *,
    centers: Optional[Sequence[int]] = None,
    workers: int = 1,
) -> VolumeCurve:
    """Mean intercepted-point count over the sampled centers, per grid radius.

    Counts are accumulated as exact integers, so ``workers`` (threads over
    center chunks) never changes the result.
    """
    if centers is None:
        if plan is None:
            raise ValueError("need a sampling plan or explicit centers")
        centers = sample_centers(field, plan)
        seed = plan.seed
    else:
        centers = np.asarray(centers, dtype=np.int64)
        if centers.ndim != 1 or centers.size == 0:
            raise ValueError("centers must be a non-empty 1-D index list")
        if centers.min() < 0 or centers.max() >= field.size:
            raise IndexError("center index outside the image")
        seed = plan.seed if plan is not None else None

    if workers > 1 and len(centers) > 1:
        chunks = np.array_split(centers, min(workers, len(centers)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _histogram(field, c, grid.r_max), chunks))
        hist = np.sum(parts, axis=0)
    else:
        hist = _histogram(field, centers, grid.r_max)

    totals = np.cumsum(hist)[grid.sq_dists]
    v = totals / len(centers)
    v.setflags(write=False)
    return VolumeCurve(grid, v, len(centers), seed, field.width, field.height)


def log_log(curve: VolumeCurve) -> LogLogCurve:
    """``(ln r, ln V(r))`` per grid entry, with ``ln r = ln(n) / 2``."""
    lr = 0.5 * np.log(curve.grid.sq_dists.astype(np.float64))
    lv = np.log(curve.v)
    return LogLogCurve(lr, lv)


def curve_to_csv(curve: VolumeCurve, config: Optional[dict] = None) -> str:
    lines = []
    if config is not None:
        lines.append(config_comment(config))
    lines.append("sq_dist,r,V")
    for n, r, v in zip(curve.grid.sq_dists.tolist(), curve.grid.radii.tolist(), curve.v.tolist()):
        lines.append(f"{n},{r!r},{v!r}")
    return "\n".join(lines) + "\n"


def write_curve(curve: VolumeCurve, path, config: Optional[dict] = None) -> None:
    """Write the curve CSV plus a ``.json`` sidecar next to it."""
    path = Path(path)
    atomic_write_text(path, curve_to_csv(curve, config))
    meta = {
        "n_centers": curve.n_centers,
        "seed": curve.seed,
        "r_max": curve.grid.r_max,
        "width": curve.width,
        "height": curve.height,
    }
    atomic_write_text(path.with_suffix(".json"), json.dumps(meta, sort_keys=True) + "\n")
