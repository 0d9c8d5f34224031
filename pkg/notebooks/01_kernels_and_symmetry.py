"""
Standard versus isotropic spectral kernels.

Builds both model variants, compares their parameter budgets and shows that
only the isotropic one commutes with the symmetries of the square.

    python notebooks/01_kernels_and_symmetry.py
"""

import numpy as np

from isofno import spectral, symmetry
from isofno.grid import D4, apply_group
from isofno.model import ModelConfig, count_parameters, forward, random_parameters, spectral_parameter_count

# %% Parameter budgets at the reference size (width 32, 16 modes, 4 layers)
for variant in ("standard", "isotropic"):
    cfg = ModelConfig(variant, 32, 16, 4)
    print(f"{variant:>10}: {count_parameters(cfg):>9,d} parameters, {spectral_parameter_count(cfg):>9,d} spectral")

ratio = count_parameters(ModelConfig("standard", 32, 16, 4)) / count_parameters(ModelConfig("isotropic", 32, 16, 4))
print(f"ratio {ratio:.2f}; asymptotic reduction in 2D {symmetry.reduction_factor(2):g}, in 3D {symmetry.reduction_factor(3):g}")

# %% One generator fills the whole retained block
m, H = 4, 16
rows = spectral.retained_rows(H, m, symmetric=True)
gen = np.arange(symmetry.generator_size(m), dtype=float)
kernel = symmetry.expand_generator(gen, m, rows, H)
print("\ngenerator index per retained mode (rows k_x = 0..3, -3..-1; columns k_y = 0..3):")
print(kernel.astype(int))
print("symmetry violations:", symmetry.verify_kernel_symmetry(kernel, rows, H))

# %% Equivariance of the full network
a = np.random.default_rng(0).standard_normal((64, 64))
for variant in ("standard", "isotropic"):
    cfg = ModelConfig(variant, width=8, modes=8, layers=4)
    params = random_parameters(cfg, 0)
    u = forward(cfg, params, a)
    worst = {g.value: np.abs(forward(cfg, params, apply_group(g, a)) - apply_group(g, u)).max() for g in D4}
    print(f"\n{variant}: max |f(g a) - g f(a)|")
    for name, v in worst.items():
        print(f"  {name:>14}: {v:.2e}")
