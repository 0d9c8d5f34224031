"""Fourier neural operators with D4-symmetric (isotropic) spectral kernels."""

from .grid import D4, GroupElement, apply_group, pointwise_affine, relu, translate
from .model import (
    ISOTROPIC,
    STANDARD,
    ModelConfig,
    ModelParameters,
    count_parameters,
    forward,
    init_parameters,
    random_parameters,
)
from .gradients import backward, forward_with_tape, grad_check, loss_and_gradient
from .training import TrainConfig, cosine_lr, train
from .metrics import dataset_report, relative_h2, relative_l2

__version__ = "0.1.0"
