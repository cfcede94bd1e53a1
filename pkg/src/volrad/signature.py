"""Slope fits on the log-log curve: global dimension and piecewise signature."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._io import atomic_write_text, config_comment
from .vrfd import LogLogCurve

__all__ = [
    "FitResult",
    "Signature",
    "ols_slope",
    "fractal_dimension",
    "make_signature",
    "signature_csv",
    "write_signatures",
]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    n_points: int


@dataclass(frozen=True, eq=False)
class Signature:
    m: int
    alphas: np.ndarray

    @property
    def k(self) -> int:
        return len(self.alphas)


def ols_slope(points) -> FitResult:
    """Least-squares line through ``(x, y)`` points.

    Raises ``ValueError`` for fewer than two points or when every x is equal.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (x, y) pairs")
    return _fit(pts[:, 0], pts[:, 1])


def _fit(x: np.ndarray, y: np.ndarray) -> FitResult:
    n = len(x)
    if n < 2:
        raise ValueError(f"need at least 2 points for a line fit, got {n}")
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all x values are equal")
    slope = float(dx @ (y - ym)) / sxx
    return FitResult(slope, float(ym - slope * xm), n)


def fractal_dimension(
    curve: LogLogCurve, r_min: Optional[float] = None, r_max: Optional[float] = None
) -> float:
    """Slope of the full log-log curve, optionally restricted to ``r_min <= r <= r_max``."""
    lr, lv = curve.lr, curve.lv
    keep = np.ones(len(lr), dtype=bool)
    if r_min is not None:
        keep &= lr >= np.log(r_min) - 1e-12
    if r_max is not None:
        keep &= lr <= np.log(r_max) + 1e-12
    return _fit(lr[keep], lv[keep]).slope


def make_signature(curve: LogLogCurve, m: int) -> Signature:
    """Slopes of consecutive, disjoint ``m``-point runs; the ``P mod m`` tail is dropped."""
    p = len(curve)
    if m < 2:
        raise ValueError(f"segment length m must be >= 2, got {m}")
    if m > p:
        raise ValueError(f"segment length m={m} exceeds the curve length {p}")
    k = p // m
    alphas = np.array(
        [_fit(curve.lr[j * m : (j + 1) * m], curve.lv[j * m : (j + 1) * m]).slope for j in range(k)]
    )
    alphas.setflags(write=False)
    return Signature(m, alphas)


def signature_csv(
    rows: Iterable[tuple[str, Optional[int], Signature]], config: Optional[dict] = None
) -> str:
    """CSV text ``sample_name,class_id,m,alpha_1..alpha_k``; ``class_id`` may be blank."""
    rows = list(rows)
    k = max((sig.k for _, _, sig in rows), default=0)
    lines = []
    if config is not None:
        lines.append(config_comment(config))
    lines.append(",".join(["sample_name", "class_id", "m"] + [f"alpha_{i + 1}" for i in range(k)]))
    for name, cid, sig in rows:
        fields = [_quote(name), "" if cid is None else str(cid), str(sig.m)]
        fields += [repr(float(a)) for a in sig.alphas]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def write_signatures(path, rows: Sequence, config: Optional[dict] = None) -> None:
    atomic_write_text(path, signature_csv(rows, config))


def _quote(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text
