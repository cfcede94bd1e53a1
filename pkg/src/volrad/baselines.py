"""Comparison texture descriptors: Fourier rings, co-occurrence energy/entropy, Gabor energies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ._io import atomic_write_text, config_comment
from .imgio import GrayImage

__all__ = [
    "FeatureVector",
    "fourier_descriptors",
    "cooccurrence_matrix",
    "cooccurrence_descriptors",
    "glcm_energy_entropy",
    "gabor_bank",
    "gabor_descriptors",
    "feature_csv",
    "write_features",
    "FOURIER_RINGS",
    "GLCM_OFFSETS",
]

FOURIER_RINGS = 99

# (dx, dy) with y pointing down, for angles -45, 0, 45, 90 degrees
GLCM_OFFSETS = ((1, 1), (1, 0), (1, -1), (0, -1))
GLCM_DISTANCES = (1, 2)

GABOR_LOW = 0.01
GABOR_HIGH = 0.3
GABOR_SCALES = 4
GABOR_ORIENTATIONS = 4


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    method_tag: str

    def __len__(self) -> int:
        return len(self.values)


def _as_float(img: GrayImage) -> np.ndarray:
    a = img.pixels.astype(np.float64)
    # mean removal only touches the DC term, which every descriptor ignores
    return a - a.mean()


# ------------------------------------------------------------------ Fourier


def fourier_descriptors(img: GrayImage, n_rings: int = FOURIER_RINGS) -> FeatureVector:
    """Sum of centered spectrum magnitudes over equal-width radial rings.

    Radii are measured in frequency-bin units from the DC bin; rings cover
    ``(0, R_max]`` where ``R_max`` is the largest radius present. DC is excluded.
    """
    if img.width < 2 or img.height < 2:
        raise ValueError("Fourier descriptors need an image of at least 2x2")
    mag = np.abs(np.fft.fftshift(np.fft.fft2(_as_float(img))))
    h, w = mag.shape
    yy, xx = np.indices(mag.shape)
    radius = np.hypot(yy - h // 2, xx - w // 2)
    r_max = radius.max()
    width = r_max / n_rings
    ring = np.ceil(radius / width).astype(np.int64) - 1
    ring = np.clip(ring, 0, n_rings - 1)
    nonzero = radius > 0
    values = np.bincount(ring[nonzero], weights=mag[nonzero], minlength=n_rings)
    return FeatureVector(values, "fourier")


# ------------------------------------------------------------ co-occurrence


def cooccurrence_matrix(img: GrayImage, dx: int, dy: int, levels: int = 256) -> np.ndarray:
    """Normalized non-symmetric matrix ``P[source, target]`` for target = source + (dx, dy)."""
    a = img.pixels
    h, w = a.shape
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    if y1 <= y0 or x1 <= x0:
        raise ValueError(f"offset ({dx}, {dy}) leaves no pixel pairs in a {w}x{h} image")
    src = a[y0:y1, x0:x1].astype(np.int64).ravel()
    tgt = a[y0 + dy : y1 + dy, x0 + dx : x1 + dx].astype(np.int64).ravel()
    counts = np.bincount(src * levels + tgt, minlength=levels * levels)
    return (counts / counts.sum()).reshape(levels, levels)


def glcm_energy_entropy(p: np.ndarray) -> tuple[float, float]:
    """``sum p^2`` and ``-sum p ln p`` (empty cells contribute nothing)."""
    nz = p[p > 0]
    return float(np.sum(nz * nz)), float(-np.sum(nz * np.log(nz))) + 0.0


def cooccurrence_descriptors(img: GrayImage) -> FeatureVector:
    """Energy and entropy for distances 1, 2 at -45, 0, 45, 90 degrees (16 values)."""
    values = []
    for d in GLCM_DISTANCES:
        for dx, dy in GLCM_OFFSETS:
            values.extend(glcm_energy_entropy(cooccurrence_matrix(img, dx * d, dy * d)))
    return FeatureVector(np.array(values), "glcm")


# -------------------------------------------------------------------- Gabor


def _gabor_widths(high: float, ratio: float, n_orient: int) -> tuple[float, float]:
    # frequency-domain std devs at the highest center frequency such that
    # adjacent filters meet at half of their peak response
    ln2 = math.log(2.0)
    su = (ratio - 1.0) * high / ((ratio + 1.0) * math.sqrt(2.0 * ln2))
    sv = math.tan(math.pi / (2 * n_orient)) * (high - 2.0 * ln2 * su * su / high)
    sv /= math.sqrt(2.0 * ln2 - (2.0 * ln2) ** 2 * su * su / (high * high))
    return su, sv


def gabor_bank(
    shape: tuple[int, int],
    low: float = GABOR_LOW,
    high: float = GABOR_HIGH,
    n_scales: int = GABOR_SCALES,
    n_orient: int = GABOR_ORIENTATIONS,
) -> list[np.ndarray]:
    """Frequency-domain Gabor transfer functions on an ``fft2`` grid.

    Center frequencies are geometrically spaced from ``low`` to ``high``
    (cycles/pixel); orientations are ``k * 180 / n_orient`` degrees. Filters
    are ordered frequency-major. The DC gain is forced to zero.
    """
    h, w = shape
    ratio = (high / low) ** (1.0 / (n_scales - 1))
    su_top, sv_top = _gabor_widths(high, ratio, n_orient)
    v = np.fft.fftfreq(h)[:, None]
    u = np.fft.fftfreq(w)[None, :]
    bank = []
    for s in range(n_scales):
        f = low * ratio**s
        scale = f / high
        su, sv = su_top * scale, sv_top * scale
        for o in range(n_orient):
            theta = math.pi * o / n_orient
            ur = u * math.cos(theta) + v * math.sin(theta)
            vr = -u * math.sin(theta) + v * math.cos(theta)
            g = np.exp(-0.5 * (((ur - f) / su) ** 2 + (vr / sv) ** 2))
            g[0, 0] = 0.0
            bank.append(g)
    return bank


def gabor_descriptors(img: GrayImage) -> FeatureVector:
    """Energy of each of the 16 filter responses (circular convolution)."""
    if img.width < 8 or img.height < 8:
        raise ValueError("Gabor descriptors need an image of at least 8x8")
    spec = np.fft.fft2(_as_float(img))
    n = spec.size
    # Parseval: sum |ifft2(F G)|^2 == sum |F G|^2 / n
    power = np.abs(spec) ** 2
    values = [float(np.sum(power * g * g)) / n for g in gabor_bank(spec.shape)]
    return FeatureVector(np.array(values), "gabor")


# ---------------------------------------------------------------------- CSV


def feature_csv(
    rows: Iterable[tuple[str, Optional[int], FeatureVector]], config: Optional[dict] = None
) -> str:
    """CSV text ``sample_name,class_id,method_tag,f_1..f_n``."""
    rows = list(rows)
    n = max((len(fv) for _, _, fv in rows), default=0)
    lines = []
    if config is not None:
        lines.append(config_comment(config))
    lines.append(",".join(["sample_name", "class_id", "method_tag"] + [f"f_{i + 1}" for i in range(n)]))
    for name, cid, fv in rows:
        fields = [name, "" if cid is None else str(cid), fv.method_tag]
        fields += [repr(float(x)) for x in fv.values]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def write_features(path, rows, config: Optional[dict] = None) -> None:
    atomic_write_text(path, feature_csv(rows, config))
