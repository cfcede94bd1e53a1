"""Height-field lifting of gray images and the lattice radii grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imgio import GrayImage

__all__ = ["HeightField", "RadiiGrid", "lift", "radii_grid", "is_sum_of_three_squares"]


@dataclass(frozen=True, eq=False)
class HeightField:
    """One lattice point ``(y, x, z)`` per pixel, ``z`` the gray level.

    ``z`` is an ``(height, width)`` int64 array. ``z_scale`` is the integer
    factor already applied to the gray levels.
    """

    z: np.ndarray
    z_scale: int = 1

    @property
    def width(self) -> int:
        return self.z.shape[1]

    @property
    def height(self) -> int:
        return self.z.shape[0]

    @property
    def size(self) -> int:
        return self.z.size

    def points(self) -> np.ndarray:
        """All points as an ``(|S|, 3)`` array of ``(y, x, z)`` rows, row-major."""
        yy, xx = np.indices(self.z.shape)
        return np.column_stack([yy.ravel(), xx.ravel(), self.z.ravel()])


def lift(img: GrayImage, z_scale: int = 1) -> HeightField:
    if int(z_scale) != z_scale or z_scale < 1:
        # squared distances must stay integral for exact histogramming
        raise ValueError(f"z_scale must be a positive integer, got {z_scale!r}")
    z = img.pixels.astype(np.int64) * int(z_scale)
    z.setflags(write=False)
    return HeightField(z, int(z_scale))


def is_sum_of_three_squares(n: int) -> bool:
    """Legendre: n >= 0 is a sum of three squares unless n = 4^a (8b + 7)."""
    if n < 0:
        return False
    if n == 0:
        return True
    while n % 4 == 0:
        n //= 4
    return n % 8 != 7


@dataclass(frozen=True, eq=False)
class RadiiGrid:
    r_max: int
    sq_dists: np.ndarray

    def __len__(self) -> int:
        return len(self.sq_dists)

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.sq_dists.astype(np.float64))

    @property
    def max_sq(self) -> int:
        return self.r_max * self.r_max


def radii_grid(r_max: int) -> RadiiGrid:
    """Every squared lattice distance in ``[1, r_max**2]``, ascending."""
    if int(r_max) != r_max or r_max < 1:
        raise ValueError(f"r_max must be an integer >= 1, got {r_max!r}")
    r_max = int(r_max)
    n = np.arange(1, r_max * r_max + 1, dtype=np.int64)
    odd = n.copy()
    # strip factors of 4, then exclude residue 7 mod 8
    while True:
        div4 = odd % 4 == 0
        if not div4.any():
            break
        odd[div4] //= 4
    sq = n[odd % 8 != 7]
    sq.setflags(write=False)
    return RadiiGrid(r_max, sq)
