"""
Darcy flow data: -div(a grad u) = f on the unit square, u = 0 on the boundary.

Coefficients are thresholded Gaussian random fields with covariance operator
(-Laplacian + tau^2)^(-alpha), taking the values 12 (field >= 0) and 3.
The PDE is discretized with the 5-point stencil on an n x n node grid that
includes the boundary nodes, using harmonic-mean diffusivities on the cell
faces, and solved with unpreconditioned conjugate gradients.
"""

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ShapeError, SolverError

__all__ = [
    "A_LOW",
    "A_HIGH",
    "DarcySample",
    "sample_grf",
    "threshold_coefficient",
    "face_diffusivities",
    "apply_operator",
    "boundary_outflow",
    "solve_darcy",
    "generate_sample",
    "generate_dataset",
    "node_coordinates",
]

A_LOW = 3.0
A_HIGH = 12.0


@dataclass
class DarcySample:
    a: np.ndarray
    u: np.ndarray

    @property
    def resolution(self):
        return self.a.shape[0]


def node_coordinates(n):
    """Coordinates of the n grid nodes along one axis, boundaries included."""
    return np.linspace(0.0, 1.0, n)


def sample_grf(seed, n, tau=3.0, alpha=2.0):
    """Periodic zero-mean Gaussian random field on an n x n grid.

    The spectral density is proportional to (4 pi^2 |k|^2 + tau^2)^(-alpha).
    Filtering white noise in Fourier space keeps the field real by construction.
    """
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, n))
    k = spectral.signed_frequencies(n)
    k2 = k[:, None] ** 2 + k[None, :] ** 2
    sigma = tau ** (alpha - 1.0)
    amp = n * sigma * (4 * np.pi**2 * k2 + tau**2) ** (-alpha / 2.0)
    amp[0, 0] = 0.0
    return spectral.ifft2(spectral.fft2(noise) * amp).real


def threshold_coefficient(w, low=A_LOW, high=A_HIGH):
    return np.where(np.asarray(w) >= 0, high, low).astype(np.float64)


def face_diffusivities(a):
    """Harmonic means of ``a`` across vertical (i, i+1) and horizontal (j, j+1) node pairs."""
    a = np.asarray(a, dtype=np.float64)
    kx = 2 * a[1:, :] * a[:-1, :] / (a[1:, :] + a[:-1, :])
    ky = 2 * a[:, 1:] * a[:, :-1] / (a[:, 1:] + a[:, :-1])
    return kx, ky


def apply_operator(kx, ky, u, h):
    """Discrete -div(a grad u) at every node of ``u`` (boundary rows of the result are unused)."""
    fx = kx * (u[1:, :] - u[:-1, :])
    fy = ky * (u[:, 1:] - u[:, :-1])
    out = np.zeros_like(u)
    out[1:-1, :] -= fx[1:, :] - fx[:-1, :]
    out[:, 1:-1] -= fy[:, 1:] - fy[:, :-1]
    return out / (h * h)


def boundary_outflow(a, u):
    """Total flux sum_f k_f (u_interior - u_boundary) through faces touching the boundary.

    By telescoping this equals h^2 times the sum of the discrete operator over
    interior nodes.
    """
    kx, ky = face_diffusivities(a)
    n = u.shape[0]
    flux = 0.0
    flux += np.sum(kx[0, 1:-1] * (u[1, 1:-1] - u[0, 1:-1]))
    flux += np.sum(kx[n - 2, 1:-1] * (u[n - 2, 1:-1] - u[n - 1, 1:-1]))
    flux += np.sum(ky[1:-1, 0] * (u[1:-1, 1] - u[1:-1, 0]))
    flux += np.sum(ky[1:-1, n - 2] * (u[1:-1, n - 2] - u[1:-1, n - 1]))
    return float(flux)


def solve_darcy(a, f=1.0, tol=1e-8, max_iter=None):
    """Solve the Dirichlet problem on the node grid of ``a`` to relative residual ``tol``.

    ``f`` is a grid of the same shape or a scalar. Boundary values of the
    returned field are exactly zero.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 3:
        raise ShapeError(f"expected a square grid of at least 3x3 nodes, got {a.shape}")
    if np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError("diffusion coefficient must be positive and finite")
    n = a.shape[0]
    h = 1.0 / (n - 1)
    f = np.broadcast_to(np.asarray(f, dtype=np.float64), a.shape)
    kx, ky = face_diffusivities(a)
    if max_iter is None:
        max_iter = 10 * n * n

    u = np.zeros_like(a)
    b = np.zeros_like(a)
    b[1:-1, 1:-1] = f[1:-1, 1:-1]
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return u

    def op(p):
        out = apply_operator(kx, ky, p, h)
        out[0, :] = out[-1, :] = 0.0
        out[:, 0] = out[:, -1] = 0.0
        return out

    r = b.copy()
    p = r.copy()
    rr = np.vdot(r, r).real
    for it in range(1, max_iter + 1):
        ap = op(p)
        alpha = rr / np.vdot(p, ap).real
        u += alpha * p
        r -= alpha * ap
        rr_new = np.vdot(r, r).real
        if np.sqrt(rr_new) < tol * bnorm:
            return u
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise SolverError(
        f"CG did not reach relative residual {tol:g} in {max_iter} iterations "
        f"(residual {np.sqrt(rr) / bnorm:.3e})",
        residual=float(np.sqrt(rr) / bnorm),
        iterations=max_iter,
    )


def generate_sample(seed, n, tol=1e-8):
    a = threshold_coefficient(sample_grf(seed, n))
    return DarcySample(a, solve_darcy(a, 1.0, tol))


def generate_dataset(count, seed0, n, tol=1e-8):
    """``count`` samples at resolution ``n``; sample i is drawn from seed ``seed0 + i``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return [generate_sample(seed0 + i, n, tol) for i in range(count)]
