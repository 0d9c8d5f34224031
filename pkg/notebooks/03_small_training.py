"""
A small training run of both variants on Darcy data.

Trains on 40 samples at 32 x 32 for a few epochs, then evaluates each model
on the training data transformed by flips and a transpose. The isotropic
error is unchanged by construction; the standard error drifts.

    python notebooks/03_small_training.py        (about a minute)
"""

import numpy as np

from isofno import darcy
from isofno.cli import DARCY_PADDING
from isofno.grid import GroupElement
from isofno.metrics import dataset_report
from isofno.model import ModelConfig
from isofno.training import TrainConfig, train

train_set = darcy.generate_dataset(40, 0, 32)
test_set = darcy.generate_dataset(10, 1000, 32)
pairs = [(s.a, s.u) for s in train_set]

# %% Train
models = {}
for variant in ("standard", "isotropic"):
    cfg = ModelConfig(variant, width=12, modes=8, layers=3, padding=DARCY_PADDING)
    params, history = train(TrainConfig(epochs=10, batch_size=10, lr0=2e-3), cfg, train_set, test_set)
    models[variant] = (cfg, params)
    print(f"{variant:>10}: train L2 {history[0, 0]:.3f} -> {history[-1, 0]:.3f}, test L2 {history[-1, 1]:.3f}")

# %% Transformed evaluation
print(f"\n{'':>10} " + " ".join(f"{t:>10}" for t in ("none", "flip-x", "flip-y", "transpose")))
spread = {}
for variant, (cfg, params) in models.items():
    row = np.array([dataset_report(cfg, params, pairs, GroupElement.parse(t)).mean_l2 for t in ("none", "flip-x", "flip-y", "transpose")])
    spread[variant] = np.abs(row - row[0]).max() / row[0]
    print(f"{variant:>10} " + " ".join(f"{v:10.5f}" for v in row))
print("\nlargest relative change from the untransformed error:", {k: f"{v:.1e}" for k, v in spread.items()})
