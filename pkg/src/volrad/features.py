"""Feature extraction for a whole dataset, one method at a time."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .baselines import cooccurrence_descriptors, fourier_descriptors, gabor_descriptors
from .cloud import lift, radii_grid
from .config import RunConfig
from .imgio import GrayImage, LabeledDataset
from .signature import Signature, fractal_dimension, make_signature
from .vrfd import VolumeCurve, log_log, volume_curve

__all__ = ["image_curve", "image_signature", "image_dimension", "image_features", "dataset_features"]


def image_curve(img: GrayImage, config: RunConfig, seed=None) -> VolumeCurve:
    field = lift(img, config.z_scale)
    return volume_curve(field, config.plan(seed), radii_grid(config.r_max), workers=config.workers)


def image_signature(img: GrayImage, config: RunConfig, seed=None) -> Signature:
    return make_signature(log_log(image_curve(img, config, seed)), config.m)


def image_dimension(img: GrayImage, config: RunConfig, seed=None) -> float:
    return fractal_dimension(log_log(image_curve(img, config, seed)))


def image_features(img: GrayImage, method: str, config: RunConfig) -> np.ndarray:
    if method == "vrfd":
        return np.asarray(image_signature(img, config).alphas)
    if method == "fourier":
        return fourier_descriptors(img).values
    if method == "glcm":
        return cooccurrence_descriptors(img).values
    if method == "gabor":
        return gabor_descriptors(img).values
    raise ValueError(f"unknown method {method!r}")


def dataset_features(dataset: LabeledDataset, method: str, config: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix (one row per sample, dataset order) and label vector."""
    images = [s.image for s in dataset.samples]
    inner = config.updated(workers=1) if config.workers > 1 else config
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda im: image_features(im, method, inner), images))
    else:
        rows = [image_features(im, method, config) for im in images]
    return np.vstack(rows), dataset.labels
