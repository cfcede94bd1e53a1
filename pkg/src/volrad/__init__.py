"""Volume-radius fractal texture descriptors, baseline descriptors and LDA evaluation."""

__version__ = "0.1.0"

from .cloud import HeightField, RadiiGrid, lift, radii_grid
from .config import RunConfig
from .imgio import GrayImage, LabeledDataset, ingest_dataset, read_pgm, write_pgm
from .signature import Signature, fractal_dimension, make_signature, ols_slope
from .vrfd import SamplingPlan, VolumeCurve, count_within, log_log, sample_centers, volume_curve

__all__ = [
    "GrayImage",
    "LabeledDataset",
    "read_pgm",
    "write_pgm",
    "ingest_dataset",
    "HeightField",
    "RadiiGrid",
    "lift",
    "radii_grid",
    "SamplingPlan",
    "VolumeCurve",
    "sample_centers",
    "count_within",
    "volume_curve",
    "log_log",
    "Signature",
    "ols_slope",
    "fractal_dimension",
    "make_signature",
    "RunConfig",
]
