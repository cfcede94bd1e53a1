"""Run configuration shared by the CLI and the feature pipeline."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional, Tuple

from .vrfd import SamplingPlan

METHODS = ("vrfd", "fourier", "glcm", "gabor")


@dataclass(frozen=True)
class RunConfig:
    """Pipeline parameters. Defaults are the r = 20, 10 %-of-pixels operating point."""

    r_max: int = 20
    center_fraction: Optional[float] = 0.10
    n_centers: Optional[int] = None
    m: int = 10
    seed: int = 0
    method: str = "vrfd"
    tile: Optional[Tuple[int, int]] = None
    out: Optional[str] = None
    z_scale: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError(f"r_max must be >= 1, got {self.r_max}")
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if self.method not in METHODS + ("all",):
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS + ('all',)}")
        if self.tile is not None:
            object.__setattr__(self, "tile", tuple(int(t) for t in self.tile))

    def plan(self, seed: Optional[int] = None) -> SamplingPlan:
        seed = self.seed if seed is None else seed
        if self.n_centers is not None:
            return SamplingPlan(n_centers=self.n_centers, seed=seed)
        return SamplingPlan(fraction=self.center_fraction, seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["tile"] is not None:
            d["tile"] = list(d["tile"])
        return d

    def provenance(self) -> dict:
        """Fields that determine results; output location and thread count are left out."""
        d = self.to_dict()
        del d["out"], d["workers"]
        return d

    def updated(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)
