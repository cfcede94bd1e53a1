"""Deterministic synthetic textures with controllable roughness."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.ndimage import uniform_filter

from .imgio import GrayImage, LabeledDataset, Sample, save_pgm

__all__ = [
    "SynthSpec",
    "KINDS",
    "generate",
    "make_synth_dataset",
    "sample_seed",
    "export_dataset",
    "benchmark_classes",
]

KINDS = ("flat", "flat-noise", "uniform-noise", "smoothed-noise", "checker", "midpoint-displacement")

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SynthSpec:
    """Texture recipe.

    ``k`` is the box width for ``smoothed-noise``; ``period`` is the checker
    block side; ``h`` is the Hurst-style exponent of ``midpoint-displacement``
    (displacements shrink by ``2**-h`` per level, so small ``h`` is rough);
    ``amplitude`` bounds the +/- noise added to 128 by ``flat-noise``.
    """

    kind: str
    width: int = 64
    height: int = 64
    seed: int = 0
    k: int = 3
    period: int = 8
    h: float = 0.5
    amplitude: int = 8

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown texture kind {self.kind!r}; expected one of {KINDS}")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        if self.kind == "smoothed-noise" and (self.k < 1 or self.k % 2 == 0):
            raise ValueError(f"box width k must be a positive odd integer, got {self.k}")
        if self.kind == "checker" and self.period < 1:
            raise ValueError(f"checker period must be >= 1, got {self.period}")
        if self.kind == "midpoint-displacement" and not 0 < self.h < 1:
            raise ValueError(f"h must lie in (0, 1), got {self.h}")
        if self.kind == "flat-noise" and not 0 <= self.amplitude <= 127:
            raise ValueError(f"amplitude must lie in [0, 127], got {self.amplitude}")


def _rescale(a: np.ndarray) -> np.ndarray:
    lo, hi = a.min(), a.max()
    if hi == lo:
        return np.full(a.shape, 128, dtype=np.uint8)
    return np.rint((a - lo) * (255.0 / (hi - lo))).astype(np.uint8)


def _diamond_square(n_levels: int, h: float, rng: np.random.Generator) -> np.ndarray:
    size = (1 << n_levels) + 1
    a = np.zeros((size, size))
    a[0, 0], a[0, -1], a[-1, 0], a[-1, -1] = rng.standard_normal(4)
    step = size - 1
    scale = 1.0
    while step > 1:
        half = step // 2
        scale *= 2.0 ** (-h)
        # diamond: square centers
        c = (a[0:-1:step, 0:-1:step] + a[step::step, 0:-1:step] + a[0:-1:step, step::step] + a[step::step, step::step]) / 4
        a[half::step, half::step] = c + scale * rng.standard_normal(c.shape)
        # square: edge midpoints, averaging the in-bounds neighbours
        for y0 in (0, half):
            x0 = half if y0 == 0 else 0
            ys = np.arange(y0, size, step)
            xs = np.arange(x0, size, step)
            yy, xx = np.meshgrid(ys, xs, indexing="ij")
            total = np.zeros(yy.shape)
            count = np.zeros(yy.shape)
            for dy, dx in ((-half, 0), (half, 0), (0, -half), (0, half)):
                ny, nx = yy + dy, xx + dx
                ok = (ny >= 0) & (ny < size) & (nx >= 0) & (nx < size)
                total[ok] += a[ny[ok], nx[ok]]
                count[ok] += 1
            a[yy, xx] = total / count + scale * rng.standard_normal(yy.shape)
        step = half
    return a


def generate(spec: SynthSpec) -> GrayImage:
    spec.validate()
    h, w = spec.height, spec.width
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.kind == "flat":
        return GrayImage(np.full((h, w), 128, dtype=np.uint8))
    if spec.kind == "flat-noise":
        noise = rng.integers(-spec.amplitude, spec.amplitude + 1, size=(h, w))
        return GrayImage((128 + noise).astype(np.uint8))
    if spec.kind == "uniform-noise":
        return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))
    if spec.kind == "smoothed-noise":
        noise = rng.integers(0, 256, size=(h, w)).astype(np.float64)
        return GrayImage(_rescale(uniform_filter(noise, size=spec.k, mode="reflect")))
    if spec.kind == "checker":
        yy, xx = np.indices((h, w))
        parity = (yy // spec.period + xx // spec.period) % 2
        return GrayImage((parity * 255).astype(np.uint8))
    levels = max(1, math.ceil(math.log2(max(h, w) - 1))) if max(h, w) > 2 else 1
    surface = _diamond_square(levels, spec.h, rng)
    return GrayImage(_rescale(surface[:h, :w]))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def sample_seed(base_seed: int, class_index: int, sample_index: int) -> int:
    """``base_seed XOR mix(c, j)``; the mix is a bijection of the packed ``(c, j)`` pair."""
    if not (0 <= class_index < 1 << 32 and 0 <= sample_index < 1 << 32):
        raise ValueError("class and sample indices must fit in 32 bits")
    return (base_seed & _MASK64) ^ _splitmix64((class_index << 32) | sample_index)


def _describe(spec: SynthSpec) -> str:
    extra = {
        "smoothed-noise": f"-k{spec.k}",
        "checker": f"-p{spec.period}",
        "midpoint-displacement": f"-h{spec.h:g}",
        "flat-noise": f"-a{spec.amplitude}",
    }.get(spec.kind, "")
    return spec.kind + extra


def make_synth_dataset(
    classes: Sequence[SynthSpec], samples_per_class: int, base_seed: int = 0
) -> LabeledDataset:
    if len(classes) < 2:
        raise ValueError("need at least 2 class templates")
    if samples_per_class < 3:
        raise ValueError(f"samples_per_class must be >= 3, got {samples_per_class}")
    for spec in classes:
        spec.validate()
    samples = []
    names = []
    for c, template in enumerate(classes):
        name = f"{c:02d}-{_describe(template)}"
        names.append(name)
        for j in range(samples_per_class):
            img = generate(replace(template, seed=sample_seed(base_seed, c, j)))
            samples.append(Sample(img, c, f"{name}/{j:03d}.pgm"))
    return LabeledDataset(samples, names)


def export_dataset(dataset: LabeledDataset, root) -> None:
    """Write ``root/<class_name>/<sample>.pgm`` so the dataset can be re-ingested."""
    root = Path(root)
    for cname in dataset.class_names:
        (root / cname).mkdir(parents=True, exist_ok=True)
    for s in dataset.samples:
        leaf = Path(s.name).name
        if not leaf.endswith(".pgm"):
            leaf += ".pgm"
        save_pgm(s.image, root / dataset.class_names[s.class_id] / leaf)


def benchmark_classes(size: int = 64) -> list[SynthSpec]:
    """The five-class set used for the end-to-end classification check."""
    return [
        SynthSpec("flat-noise", size, size),
        SynthSpec("smoothed-noise", size, size, k=3),
        SynthSpec("smoothed-noise", size, size, k=9),
        SynthSpec("checker", size, size, period=8),
        SynthSpec("uniform-noise", size, size),
    ]
