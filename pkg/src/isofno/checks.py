"""
Self-contained verification suites run by ``isofno check --suite NAME``.

Each suite returns a list of ``CheckResult`` rows; a suite passes when every
row passes.
"""

from dataclasses import dataclass

import numpy as np

from . import darcy, spectral, symmetry
from .gradients import grad_check
from .grid import D4, GroupElement, apply_group, translate
from .model import ModelConfig, count_parameters, forward, init_parameters, random_parameters, spectral_parameter_count

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: str

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} ({self.limit})"


def _below(name, value, limit):
    return CheckResult(name, bool(value < limit), float(value), f"< {limit:g}")


def fft_suite():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    ref = spectral.dft2_naive(x)
    rel = np.abs(spectral.fft2(x) - ref).max() / np.abs(ref).max()
    y = rng.standard_normal((128, 128)) + 1j * rng.standard_normal((128, 128))
    roundtrip = np.abs(spectral.ifft2(spectral.fft2(y)) - y).max()
    z = rng.standard_normal((64, 64))
    energy = np.sum(z**2)
    parseval = abs(np.sum(np.abs(spectral.fft2(z)) ** 2) / z.size - energy) / energy
    real_rt = np.abs(spectral.irfft2(spectral.rfft2(z), 64) - z).max()
    rows = spectral.retained_rows(64, 12, symmetric=False)
    pruned = np.abs(spectral.rfft2_modes(z, rows, 12) - spectral.truncate_modes(spectral.rfft2(z), rows, 12)).max()
    return [
        _below("fft2 vs naive DFT, 16x16 (relative)", rel, 1e-10),
        _below("ifft2(fft2(x)) round trip, 128x128", roundtrip, 1e-10),
        _below("Parseval identity (relative)", parseval, 1e-9),
        _below("irfft2(rfft2(x)) round trip, 64x64", real_rt, 1e-12),
        _below("retained-mode transform vs truncated rfft2", pruned, 1e-10),
    ]


def symmetry_suite():
    rng = np.random.default_rng(1)
    m, H = 16, 128
    rows = spectral.retained_rows(H, m, symmetric=True)
    kernel = symmetry.expand_generator(rng.standard_normal((3, 2, symmetry.generator_size(m))), m, rows, H)
    report = symmetry.verify_kernel_symmetry(kernel, rows, H)
    std = ModelConfig("standard", 32, 16, 4)
    iso = ModelConfig("isotropic", 32, 16, 4)
    ratio = count_parameters(std) / count_parameters(iso)
    return [
        CheckResult("expanded kernel symmetry violation", report.max == 0.0, report.max, "== 0"),
        CheckResult("reduction factor d=2", symmetry.reduction_factor(2) == 16, symmetry.reduction_factor(2), "== 16"),
        CheckResult("reduction factor d=3", symmetry.reduction_factor(3) == 96, symmetry.reduction_factor(3), "== 96"),
        CheckResult("standard spectral count", spectral_parameter_count(std) == 4194304, spectral_parameter_count(std), "== 4194304"),
        CheckResult("isotropic spectral count", spectral_parameter_count(iso) == 557056, spectral_parameter_count(iso), "== 557056"),
        CheckResult("standard / isotropic total", 7.0 <= ratio <= 8.0, ratio, "in [7, 8]"),
    ]


def equivariance_violation(cfg, params, a, shifts=()):
    """Largest |f(g a) - g f(a)| over D4 and the given circular shifts."""
    u = forward(cfg, params, a)
    worst = 0.0
    for g in D4:
        worst = max(worst, np.abs(forward(cfg, params, apply_group(g, a)) - apply_group(g, u)).max())
    for s in shifts:
        worst = max(worst, np.abs(forward(cfg, params, translate(a, s)) - translate(u, s)).max())
    return float(worst)


def equivariance_suite(models=20, width=8, modes=8, n=64):
    iso_worst = 0.0
    std_violations = []
    for seed in range(models):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((1, n, n))
        shifts = [tuple(int(v) for v in rng.integers(1, n, size=2)) for _ in range(5)]
        iso = ModelConfig("isotropic", width, modes, 4)
        iso_worst = max(iso_worst, equivariance_violation(iso, random_parameters(iso, seed), a, shifts))
        std = ModelConfig("standard", width, modes, 4)
        p = random_parameters(std, seed)
        u = forward(std, p, a)
        g = GroupElement.FLIP_X
        std_violations.append(np.abs(forward(std, p, apply_group(g, a)) - apply_group(g, u)).max())
    broken = sum(v > 1e-3 for v in std_violations)
    return [
        _below(f"isotropic D4 + translation equivariance ({models} models)", iso_worst, 1e-9),
        CheckResult(
            "standard models breaking flip-x equivariance by > 1e-3",
            broken >= int(np.ceil(0.95 * models)),
            broken,
            f">= {int(np.ceil(0.95 * models))} of {models}",
        ),
    ]


def tiny_gradcheck(variant, seed=0, eps=1e-4):
    cfg = ModelConfig(variant, width=4, modes=3, layers=2, projection_hidden=8)
    params = init_parameters(cfg, seed)
    rng = np.random.default_rng(1000 + seed)
    a = np.stack([darcy.threshold_coefficient(darcy.sample_grf(seed + i, 16)) for i in range(2)])[:, None]
    target = rng.standard_normal((2, 1, 16, 16))
    params = params.with_normalization(a.mean(), a.std(), 0.0, 1.0)
    return grad_check(cfg, params, a, target, eps)


def gradcheck_suite():
    return [_below(f"{v} gradient check (eps=1e-4)", tiny_gradcheck(v), 1e-5) for v in ("standard", "isotropic")]


def manufactured_errors(sizes=(32, 64, 128)):
    errs = []
    for n in sizes:
        x = darcy.node_coordinates(n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        exact = np.sin(np.pi * X) * np.sin(np.pi * Y)
        u = darcy.solve_darcy(np.ones((n, n)), 2 * np.pi**2 * exact, tol=1e-12)
        errs.append(np.abs(u - exact).max())
    return np.array(errs)


def darcy_suite(n=64, tol=1e-8):
    errs = manufactured_errors()
    order = float(np.min(np.log2(errs[:-1] / errs[1:])))
    sample = darcy.generate_sample(7, n, tol)
    worst = max(np.abs(darcy.solve_darcy(apply_group(g, sample.a), 1.0, tol) - apply_group(g, sample.u)).max() for g in D4)
    boundary = max(np.abs(sample.u[[0, -1], :]).max(), np.abs(sample.u[:, [0, -1]]).max())
    return [
        CheckResult("manufactured solution convergence order", order >= 1.9, order, ">= 1.9"),
        _below("solver D4 equivariance", worst, 10 * tol),
        CheckResult("boundary values exactly zero", boundary == 0.0, boundary, "== 0"),
        CheckResult("maximum principle min(u)", sample.u.min() >= -10 * tol, sample.u.min(), f">= {-10 * tol:g}"),
    ]


SUITES = {
    "fft": fft_suite,
    "symmetry": symmetry_suite,
    "equivariance": equivariance_suite,
    "gradcheck": gradcheck_suite,
    "darcy": darcy_suite,
}


def run_suite(name):
    return SUITES[name]()
