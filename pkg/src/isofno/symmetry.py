"""
D4-symmetric spectral kernels built from a triangular generator.

An isotropic kernel assigns one real weight (per channel pair) to every
unordered mode pair {|k_x|, k_y}. The free parameters therefore live on the
triangle 0 <= p <= q <= m-1, enumerated row by row::

    (0,0) (0,1) ... (0,m-1) (1,1) (1,2) ... (m-1,m-1)

Expansion copies each generator value onto its orbit under sign flips and
transposition; the adjoint of expansion sums cotangents over the same orbit.

Kernels are stored in the half-spectrum layout used by the Fourier layer:
shape ``(c_out, c_in, K, m)`` where the K rows are the retained k_x values
(see ``spectral.retained_rows``) and the m columns are k_y = 0..m-1.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import BoundsError, ShapeError

__all__ = [
    "generator_size",
    "generator_index",
    "generator_index_map",
    "expand_generator",
    "fold_kernel_cotangent",
    "orbit_slots",
    "reduction_factor",
    "standard_spectral_count",
    "isotropic_spectral_count",
    "SymmetryReport",
    "verify_kernel_symmetry",
]


def generator_size(m):
    return m * (m + 1) // 2


def generator_index(p, q, m):
    """Flat index of the unordered pair {|p|, |q|} in the triangular enumeration."""
    p, q = abs(int(p)), abs(int(q))
    if p >= m or q >= m:
        raise BoundsError(f"mode pair ({p}, {q}) outside 0..{m - 1}")
    if p > q:
        p, q = q, p
    # rows 0..p-1 hold m, m-1, ..., m-p+1 entries
    return p * m - p * (p - 1) // 2 + (q - p)


def _signed_rows(rows, H):
    rows = np.asarray(rows)
    return np.where(rows < (H + 1) // 2, rows, rows - H)


@lru_cache(maxsize=32)
def _index_map(m, signed_rows):
    kx = np.abs(np.asarray(signed_rows))
    if np.any(kx >= m):
        raise ShapeError(f"retained rows reach |k_x| = {kx.max()}, generator only covers up to {m - 1}")
    lo = np.minimum(kx[:, None], np.arange(m)[None, :])
    hi = np.maximum(kx[:, None], np.arange(m)[None, :])
    idx = lo * m - lo * (lo - 1) // 2 + (hi - lo)
    idx.setflags(write=False)
    return idx


def generator_index_map(m, rows, H):
    """``(K, m)`` array of generator indices for each retained (k_x row, k_y) slot."""
    return _index_map(m, tuple(int(k) for k in _signed_rows(rows, H)))


def expand_generator(gen, m, rows, H):
    """Expand generator values ``(c_out, c_in, m(m+1)/2)`` into a real kernel ``(c_out, c_in, K, m)``.

    Every kernel entry is a copy of a generator value, so the symmetry
    relations hold bitwise.
    """
    gen = np.asarray(gen, dtype=np.float64)
    if gen.shape[-1] != generator_size(m):
        raise ShapeError(f"generator has {gen.shape[-1]} entries, expected {generator_size(m)} for m={m}")
    return gen[..., generator_index_map(m, rows, H)]


def fold_kernel_cotangent(grad_kernel, m, rows, H):
    """Adjoint of ``expand_generator``: sum kernel cotangents over each generator orbit."""
    grad_kernel = np.asarray(grad_kernel, dtype=np.float64)
    idx = generator_index_map(m, rows, H).ravel()
    lead = grad_kernel.shape[:-2]
    flat = grad_kernel.reshape(lead + (idx.size,))
    out = np.zeros(lead + (generator_size(m),))
    np.add.at(out, (..., idx), flat)
    return out


def orbit_slots(p, q):
    """Distinct full-spectrum modes (k_x, k_y) sharing the weight of the pair {p, q}."""
    slots = set()
    for a, b in ((p, q), (q, p)):
        for sa in (1, -1):
            for sb in (1, -1):
                slots.add((sa * a, sb * b))
    return sorted(slots)


def reduction_factor(d):
    """Asymptotic parameter reduction 2^(d+1) d! of a hyperoctahedral-symmetric kernel in d dimensions."""
    if d < 1:
        raise BoundsError(f"dimension must be at least 1, got {d}")
    return float(2 ** (d + 1) * factorial(d))


def standard_spectral_count(c_out, c_in, m):
    """Real parameters of one standard complex kernel over k_x in [-m, m-1], k_y in [0, m-1]."""
    return 2 * c_out * c_in * (2 * m) * m


def isotropic_spectral_count(c_out, c_in, m):
    return c_out * c_in * generator_size(m)


@dataclass
class SymmetryReport:
    """Largest deviation from each defining relation of an isotropic kernel."""

    reflection: float
    transpose: float
    imaginary: float

    @property
    def max(self):
        return max(self.reflection, self.transpose, self.imaginary)


def verify_kernel_symmetry(kernel, rows, H):
    """Measure R[k,l] = R[-k,l], R[k,l] = R[l,k] and Im R = 0 over all channels.

    Only pairs where both partner modes are in the retained block are compared.
    """
    kernel = np.asarray(kernel)
    signed = [int(k) for k in _signed_rows(rows, H)]
    pos = {k: r for r, k in enumerate(signed)}
    m = kernel.shape[-1]
    reflection = 0.0
    transpose = 0.0
    for k, r in pos.items():
        if -k in pos:
            d = np.abs(kernel[..., r, :] - kernel[..., pos[-k], :])
            reflection = max(reflection, float(d.max(initial=0.0)))
        if 0 <= k < m:
            for l in range(m):
                if l in pos:
                    d = np.abs(kernel[..., r, l] - kernel[..., pos[l], k])
                    transpose = max(transpose, float(d.max(initial=0.0)))
    imaginary = float(np.abs(np.imag(kernel)).max(initial=0.0))
    return SymmetryReport(reflection, transpose, imaginary)
