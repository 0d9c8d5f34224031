"""
Relative L2 and H2 errors between predicted and true fields.

The H2 error is measured spectrally: each Fourier mode of the error is
weighted by (1 + |k|^2)^2 with k the signed integer frequency, which is
equivalent to the full Sobolev H2 norm on the periodic grid.
"""

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ShapeError, UndefinedMetricError
from .grid import GroupElement, apply_group
from .model import forward

__all__ = ["relative_l2", "relative_h2", "h2_norm", "MetricReport", "dataset_report"]


def _pair(pred, truth):
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise ShapeError(f"prediction {pred.shape} and truth {truth.shape} differ in shape")
    return pred, truth


def relative_l2(pred, truth):
    pred, truth = _pair(pred, truth)
    denom = np.linalg.norm(truth)
    if denom == 0:
        raise UndefinedMetricError("relative error against an all-zero truth")
    return float(np.linalg.norm(pred - truth) / denom)


def h2_norm(x):
    """Spectral H2 norm sqrt(sum_k (1+|k|^2)^2 |x_k|^2) over the trailing two axes, unnormalized."""
    x = np.asarray(x, dtype=np.float64)
    w = spectral.spectral_h2_weights(*x.shape[-2:])
    return float(np.sqrt(np.sum(w * np.abs(spectral.fft2(x)) ** 2)))


def relative_h2(pred, truth):
    pred, truth = _pair(pred, truth)
    denom = h2_norm(truth)
    if denom == 0:
        raise UndefinedMetricError("relative error against an all-zero truth")
    return h2_norm(pred - truth) / denom


@dataclass
class MetricReport:
    l2: np.ndarray
    h2: np.ndarray

    @property
    def mean_l2(self):
        return float(np.mean(self.l2))

    @property
    def mean_h2(self):
        return float(np.mean(self.h2))

    def __len__(self):
        return len(self.l2)


def dataset_report(cfg, params, samples, transform=GroupElement.IDENTITY, batch_size=50):
    """Per-sample errors of the model on ``samples`` after transforming inputs and targets.

    ``samples`` is a sequence of (a, u) pairs of (H, W) grids.
    """
    if len(samples) == 0:
        raise ValueError("empty dataset")
    g = GroupElement.parse(transform)
    l2, h2 = [], []
    for start in range(0, len(samples), batch_size):
        chunk = samples[start : start + batch_size]
        a = np.stack([apply_group(g, s[0]) for s in chunk])[:, None]
        u = np.stack([apply_group(g, s[1]) for s in chunk])
        pred = forward(cfg, params, a)[:, 0]
        for p, t in zip(pred, u):
            l2.append(relative_l2(p, t))
            h2.append(relative_h2(p, t))
    return MetricReport(np.array(l2), np.array(h2))
