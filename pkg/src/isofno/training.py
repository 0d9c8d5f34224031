"""
Mini-batch training with Adam and a per-epoch cosine learning-rate schedule.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ShapeError
from .gradients import loss_and_gradient
from .metrics import dataset_report
from .model import init_parameters

__all__ = ["TrainConfig", "AdamState", "cosine_lr", "adam_step", "fit_normalization", "train", "METRIC_COLUMNS"]

log = logging.getLogger(__name__)

METRIC_COLUMNS = ("train_l2", "test_l2", "train_h2", "test_h2")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 20
    lr0: float = 1e-3
    lr_min: float = 0.0
    weight_decay: float = 1e-4
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigurationError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be at least 1")
        if not self.lr0 > self.lr_min >= 0:
            raise ConfigurationError(f"need lr0 > lr_min >= 0, got lr0={self.lr0}, lr_min={self.lr_min}")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, size):
        return cls(np.zeros(size), np.zeros(size), 0)


def cosine_lr(epoch, cfg):
    if not 0 <= epoch <= cfg.epochs:
        raise ValueError(f"epoch {epoch} outside 0..{cfg.epochs}")
    return cfg.lr_min + 0.5 * (cfg.lr0 - cfg.lr_min) * (1 + math.cos(math.pi * epoch / cfg.epochs))


def adam_step(params, grads, state, lr, cfg):
    """One Adam update with decoupled weight decay; returns new parameters and state."""
    theta = params.to_vector()
    g = grads.to_vector()
    if g.shape != theta.shape or state.m.shape != theta.shape:
        raise ShapeError(f"gradient {g.shape} / state {state.m.shape} do not match parameters {theta.shape}")
    step = state.step + 1
    m = cfg.beta1 * state.m + (1 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1 - cfg.beta2) * g * g
    m_hat = m / (1 - cfg.beta1**step)
    v_hat = v / (1 - cfg.beta2**step)
    theta = theta * (1 - lr * cfg.weight_decay)
    theta = theta - lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return params.with_vector(theta), AdamState(m, v, step)


def fit_normalization(params, samples):
    """Global scalar mean/std of inputs and targets over the training set."""
    a = np.stack([s[0] for s in samples])
    u = np.stack([s[1] for s in samples])
    return params.with_normalization(a.mean(), a.std(), u.mean(), u.std())


def _as_pairs(samples):
    return [(np.asarray(s[0], dtype=np.float64), np.asarray(s[1], dtype=np.float64)) for s in samples]


def train(cfg, mcfg, train_set, test_set, params=None, callback=None):
    """Train a model and record relative L2/H2 errors after every epoch.

    ``train_set`` and ``test_set`` are sequences of (a, u) grid pairs (or
    ``DarcySample``). Returns the final parameters and an ``(epochs, 4)``
    array with columns ``METRIC_COLUMNS``.
    """
    train_set = _as_pairs((s.a, s.u) if hasattr(s, "a") else s for s in train_set)
    test_set = _as_pairs((s.a, s.u) if hasattr(s, "a") else s for s in test_set)
    if not train_set or not test_set:
        raise ConfigurationError("training and test sets must be non-empty")
    shapes = {s[0].shape for s in train_set + test_set} | {s[1].shape for s in train_set + test_set}
    if len(shapes) != 1:
        raise ConfigurationError(f"samples have mixed resolutions {sorted(shapes)}")
    mcfg.check_resolution(*shapes.pop())

    if params is None:
        params = init_parameters(mcfg, cfg.seed)
    params = fit_normalization(params, train_set)
    state = AdamState.zeros(params.size)
    rng = np.random.default_rng(cfg.seed)
    a_all = np.stack([s[0] for s in train_set])[:, None]
    u_all = np.stack([s[1] for s in train_set])[:, None]

    history = np.zeros((cfg.epochs, len(METRIC_COLUMNS)))
    for epoch in range(cfg.epochs):
        lr = cosine_lr(epoch, cfg)
        order = rng.permutation(len(train_set))
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            _, grads = loss_and_gradient(mcfg, params, a_all[idx], u_all[idx])
            params, state = adam_step(params, grads, state, lr, cfg)
        tr = dataset_report(mcfg, params, train_set)
        te = dataset_report(mcfg, params, test_set)
        history[epoch] = (tr.mean_l2, te.mean_l2, tr.mean_h2, te.mean_h2)
        log.info("epoch %d lr %.2e train_l2 %.5f test_l2 %.5f", epoch + 1, lr, tr.mean_l2, te.mean_l2)
        if callback is not None:
            callback(epoch, params, history[epoch])
    return params, history
