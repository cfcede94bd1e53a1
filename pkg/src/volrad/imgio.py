"""Grayscale image I/O (PGM P2/P5) and labeled texture dataset ingestion."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "GrayImage",
    "LabeledDataset",
    "Sample",
    "PgmError",
    "BadMagicError",
    "MaxvalError",
    "TruncatedError",
    "ZeroDimensionError",
    "DatasetError",
    "read_pgm",
    "write_pgm",
    "load_pgm",
    "save_pgm",
    "ingest_dataset",
    "tile_image",
]


class PgmError(ValueError):
    """Malformed PGM stream. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class BadMagicError(PgmError):
    pass


class MaxvalError(PgmError):
    pass


class TruncatedError(PgmError):
    pass


class ZeroDimensionError(PgmError):
    pass


class DatasetError(ValueError):
    pass


class GrayImage:
    """8-bit grayscale raster.

    ``pixels`` is a read-only ``(height, width)`` uint8 array; row-major
    flattening gives the pixel sequence.
    """

    __slots__ = ("_pixels",)

    def __init__(self, pixels):
        arr = np.asarray(pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D raster, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image dimensions must be >= 1")
        if arr.dtype != np.uint8:
            if arr.size and (np.any(arr < 0) or np.any(arr > 255)):
                raise ValueError("pixel values must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
                raise ValueError("pixel values must be integers")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        self._pixels = arr

    @classmethod
    def from_sequence(cls, width: int, height: int, values: Sequence[int]) -> "GrayImage":
        values = np.asarray(values)
        if values.size != width * height:
            raise ValueError(
                f"expected {width * height} pixels for {width}x{height}, got {values.size}"
            )
        return cls(values.reshape(height, width))

    @property
    def pixels(self) -> np.ndarray:
        return self._pixels

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    @property
    def height(self) -> int:
        return self._pixels.shape[0]

    @property
    def size(self) -> int:
        return self._pixels.size

    def flat(self) -> list[int]:
        return self._pixels.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self._pixels.shape == other._pixels.shape and bool(
            np.array_equal(self._pixels, other._pixels)
        )

    def __hash__(self):
        return hash((self._pixels.shape, self._pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class Sample:
    image: GrayImage
    class_id: int
    name: str


@dataclass
class LabeledDataset:
    samples: list[Sample] = field(default_factory=list)
    class_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        for s in self.samples:
            if not 0 <= s.class_id < len(self.class_names):
                raise DatasetError(
                    f"sample {s.name!r} has class_id {s.class_id} outside "
                    f"[0, {len(self.class_names)})"
                )

    def __len__(self):
        return len(self.samples)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.class_id for s in self.samples], dtype=np.int64)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.class_names))

    def check_loo(self, min_per_class: int = 3) -> None:
        """Raise :class:`DatasetError` naming the first class that is too small."""
        if len(self.class_names) < 2:
            raise DatasetError("classification needs at least 2 classes")
        for cid, n in enumerate(self.class_counts()):
            if n < min_per_class:
                raise DatasetError(
                    f"class {self.class_names[cid]!r} has {n} sample(s); "
                    f"leave-one-out needs at least {min_per_class}"
                )


# --------------------------------------------------------------------- PGM

_WHITESPACE = b" \t\r\n\v\f"


class _Tokenizer:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in (b" ", b"\t", b"\r", b"\n", b"\v", b"\f"):
                self.pos += 1
            elif c == b"#":
                while self.pos < len(data) and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                break

    def token(self, what: str) -> Tuple[bytes, int]:
        self._skip()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos] not in _WHITESPACE and data[self.pos] != ord("#"):
            self.pos += 1
        if start == self.pos:
            raise TruncatedError(f"unexpected end of data while reading {what}", start)
        return data[start : self.pos], start

    def integer(self, what: str) -> Tuple[int, int]:
        tok, off = self.token(what)
        if not tok.isdigit():
            raise PgmError(f"invalid {what} {tok!r}", off)
        return int(tok), off


def read_pgm(data: bytes) -> GrayImage:
    """Parse a P2 (ASCII) or P5 (binary) PGM byte string.

    Values are returned exactly as stored; a maxval below 255 is not rescaled.
    """
    data = bytes(data)
    if len(data) < 2:
        raise BadMagicError("missing magic number", 0)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise BadMagicError(f"unsupported magic number {magic!r}", 0)
    if len(data) > 2 and data[2] not in _WHITESPACE and data[2] != ord("#"):
        raise BadMagicError("magic number not followed by whitespace", 2)

    tk = _Tokenizer(data)
    tk.pos = 2
    width, w_off = tk.integer("width")
    height, h_off = tk.integer("height")
    if width == 0:
        raise ZeroDimensionError("width is zero", w_off)
    if height == 0:
        raise ZeroDimensionError("height is zero", h_off)
    maxval, m_off = tk.integer("maxval")
    if maxval > 255:
        raise MaxvalError(f"maxval {maxval} exceeds 255 (16-bit PGM unsupported)", m_off)
    if maxval == 0:
        raise MaxvalError("maxval is zero", m_off)

    n = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        start = tk.pos + 1
        if tk.pos >= len(data):
            raise TruncatedError("missing raster after header", tk.pos)
        payload = data[start : start + n]
        if len(payload) < n:
            raise TruncatedError(
                f"expected {n} pixel bytes, found {len(payload)}", start + len(payload)
            )
        values = np.frombuffer(payload, dtype=np.uint8)
        bad = np.flatnonzero(values > maxval)
        if bad.size:
            raise PgmError(f"pixel value {values[bad[0]]} exceeds maxval {maxval}", start + int(bad[0]))
    else:
        values = np.empty(n, dtype=np.uint8)
        for i in range(n):
            try:
                v, off = tk.integer("pixel value")
            except TruncatedError as exc:
                raise TruncatedError(f"expected {n} pixel values, found {i}", exc.offset) from None
            if v > maxval:
                raise PgmError(f"pixel value {v} exceeds maxval {maxval}", off)
            values[i] = v
    return GrayImage(values.reshape(height, width))


def write_pgm(img: GrayImage) -> bytes:
    """Serialize as binary P5 with maxval 255."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def load_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return read_pgm(fh.read())


def save_pgm(img: GrayImage, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(write_pgm(img))
    os.replace(tmp, path)


# ----------------------------------------------------------------- dataset


def tile_image(img: GrayImage, tile: Tuple[int, int]) -> list[GrayImage]:
    """Cut non-overlapping ``(w, h)`` tiles row-major; partial edge tiles are dropped."""
    tw, th = tile
    if tw < 1 or th < 1:
        raise ValueError(f"tile size must be positive, got {tw}x{th}")
    tiles = []
    for ty in range(img.height // th):
        for tx in range(img.width // tw):
            tiles.append(GrayImage(img.pixels[ty * th : (ty + 1) * th, tx * tw : (tx + 1) * tw]))
    return tiles


def ingest_dataset(root, tile: Optional[Tuple[int, int]] = None) -> LabeledDataset:
    """Load ``root/<class_name>/<image>.pgm`` into a labeled dataset.

    Class ids follow lexicographic order of the subdirectory names. With
    ``tile`` set, every source image is split by :func:`tile_image`; sample
    names then carry a ``#<tile index>`` suffix.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {str(root)!r} is not a directory")
    class_dirs = sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name)
    if not class_dirs:
        raise DatasetError(f"no class subdirectories under {str(root)!r}")

    samples: list[Sample] = []
    names = []
    for cid, cdir in enumerate(class_dirs):
        names.append(cdir.name)
        files = sorted(
            (p for p in cdir.iterdir() if p.is_file() and p.suffix.lower() == ".pgm"),
            key=lambda p: p.name,
        )
        if not files:
            raise DatasetError(f"class directory {str(cdir)!r} contains no .pgm files")
        for f in files:
            rel = f"{cdir.name}/{f.name}"
            try:
                img = load_pgm(f)
            except (OSError, PgmError) as exc:
                raise DatasetError(f"cannot read {str(f)!r}: {exc}") from exc
            if tile is None:
                samples.append(Sample(img, cid, rel))
                continue
            parts = tile_image(img, tile)
            if not parts:
                warnings.warn(
                    f"{rel} ({img.width}x{img.height}) is smaller than tile "
                    f"{tile[0]}x{tile[1]}; it contributes no samples",
                    stacklevel=2,
                )
            for i, part in enumerate(parts):
                samples.append(Sample(part, cid, f"{rel}#{i}"))
    return LabeledDataset(samples, names)
