"""
Two-dimensional discrete Fourier transforms on the last two axes.

Convention: unnormalized forward transform, ``1/(H*W)`` on the inverse.
Power-of-two sizes go through an iterative radix-2 transform; any other
size falls back to a dense DFT along that axis. ``dft2_naive`` is an
independent direct-summation oracle used by the tests.

Real fields use half-spectrum storage: ``rfft2`` keeps columns
``0 .. W//2`` of the full spectrum, ``irfft2`` rebuilds the missing columns
from Hermitian symmetry.
"""

from functools import lru_cache

import numpy as np

from .errors import BoundsError, ShapeError

__all__ = [
    "dft2_naive",
    "fft2",
    "ifft2",
    "rfft2",
    "irfft2",
    "hermitian_column_weights",
    "signed_frequencies",
    "retained_rows",
    "truncate_modes",
    "scatter_modes",
    "rfft2_modes",
    "irfft2_modes",
    "spectral_h2_weights",
]


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


_BITREV_CACHE = {}
_TWIDDLE_CACHE = {}


def _bit_reversal(n):
    perm = _BITREV_CACHE.get(n)
    if perm is None:
        bits = n.bit_length() - 1
        idx = np.arange(n)
        perm = np.zeros(n, dtype=np.intp)
        for b in range(bits):
            perm |= ((idx >> b) & 1) << (bits - 1 - b)
        _BITREV_CACHE[n] = perm
    return perm


def _twiddles(size, sign):
    key = (size, sign)
    tw = _TWIDDLE_CACHE.get(key)
    if tw is None:
        k = np.arange(size // 2)
        tw = np.exp(sign * 2j * np.pi * k / size)
        _TWIDDLE_CACHE[key] = tw
    return tw


def _fft_last_axis(x, sign):
    """Unnormalized transform along the last axis with kernel exp(sign*2*pi*i*k*n/N)."""
    n = x.shape[-1]
    if n == 1:
        return x.astype(np.complex128, copy=True)
    if not _is_pow2(n):
        # dense fallback for non power-of-two lengths
        k = np.arange(n)
        mat = np.exp(sign * 2j * np.pi * ((np.outer(k, k) % n) / n))
        return x @ mat.T
    lead = x.shape[:-1]
    y = np.asarray(x, dtype=np.complex128)[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        y = y.reshape(*lead, n // size, size)
        tw = _twiddles(size, sign)
        even = y[..., :half]
        odd = y[..., half:] * tw
        y = np.concatenate((even + odd, even - odd), axis=-1)
        size *= 2
    return y.reshape(*lead, n)


def _transform2(x, sign):
    if x.ndim < 2:
        raise ShapeError(f"expected at least 2 dimensions, got shape {x.shape}")
    y = _fft_last_axis(x, sign)
    y = _fft_last_axis(np.swapaxes(y, -1, -2), sign)
    return np.swapaxes(y, -1, -2)


def dft2_naive(x):
    """Direct double sum X[k,l] = sum_ij x[i,j] exp(-2 pi i (k i/H + l j/W)).

    O((HW)^2); meant as a test oracle for small grids.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2:
        raise ShapeError(f"dft2_naive expects a single 2D grid, got shape {x.shape}")
    H, W = x.shape
    i = np.arange(H)[:, None]
    j = np.arange(W)[None, :]
    out = np.empty((H, W), dtype=np.complex128)
    for k in range(H):
        for l in range(W):
            # reduce the phase modulo one period before scaling
            phase = ((k * i) % H) / H + ((l * j) % W) / W
            out[k, l] = np.sum(x * np.exp(-2j * np.pi * phase))
    return out


def fft2(x):
    return _transform2(np.asarray(x), -1)


def ifft2(x):
    x = np.asarray(x)
    H, W = x.shape[-2:]
    return _transform2(x, +1) / (H * W)


def rfft2(x):
    """Half spectrum of a real field: shape (..., H, W//2 + 1)."""
    x = np.asarray(x)
    if np.iscomplexobj(x):
        raise ShapeError("rfft2 expects real input")
    W = x.shape[-1]
    return fft2(x)[..., : W // 2 + 1]


def _full_from_half(s, W):
    H = s.shape[-2]
    if s.shape[-1] != W // 2 + 1:
        raise ShapeError(f"half spectrum of width {s.shape[-1]} does not match W={W}")
    full = np.zeros(s.shape[:-1] + (W,), dtype=np.complex128)
    full[..., : W // 2 + 1] = s
    # columns W//2+1 .. W-1 mirror columns W//2-1+... down to 1
    cols = np.arange(W // 2 + 1, W)
    rows = (-np.arange(H)) % H
    if cols.size:
        full[..., cols] = np.conj(s[..., rows, :][..., W - cols])
    return full


def irfft2(s, W=None):
    """Inverse of ``rfft2``; the imaginary part is discarded so the output is real."""
    s = np.asarray(s)
    if W is None:
        W = 2 * (s.shape[-1] - 1)
    return ifft2(_full_from_half(s, W)).real


def hermitian_column_weights(W):
    """Multiplicity of each half-spectrum column in the full spectrum.

    1 for the zero column and (even W) the Nyquist column, 2 otherwise.
    """
    w = np.full(W // 2 + 1, 2.0)
    w[0] = 1.0
    if W % 2 == 0:
        w[-1] = 1.0
    return w


def signed_frequencies(n):
    """Integer frequency of each FFT index, in numpy ``fftfreq`` order."""
    k = np.arange(n)
    return np.where(k < (n + 1) // 2, k, k - n)


def retained_rows(H, m, symmetric):
    """FFT row indices of the retained k_x set.

    ``symmetric=False`` keeps k_x in [-m, m-1] (2m rows); ``symmetric=True``
    keeps |k_x| <= m-1 (2m-1 rows). Rows are ordered by signed frequency
    0, 1, ..., then the negative ones in FFT order.
    """
    if m < 1:
        raise BoundsError(f"mode count must be positive, got {m}")
    if 2 * m > H:
        raise BoundsError(f"{m} modes do not fit a resolution of {H}")
    neg = m - 1 if symmetric else m
    return np.concatenate([np.arange(m), np.arange(H - neg, H)])


def truncate_modes(s, rows, m):
    """Gather the (rows, 0..m-1) block of a half spectrum."""
    s = np.asarray(s)
    H, half = s.shape[-2:]
    if m > half or np.any(rows >= H):
        raise BoundsError(f"mode block ({len(rows)} rows, {m} columns) exceeds spectrum {s.shape[-2:]}")
    return s[..., rows, :m]


def scatter_modes(block, rows, H, W):
    """Place a mode block into an otherwise zero half spectrum of an H x W field."""
    block = np.asarray(block)
    m = block.shape[-1]
    if m > W // 2 + 1 or np.any(rows >= H):
        raise BoundsError(f"mode block does not fit an {H}x{W} grid")
    out = np.zeros(block.shape[:-2] + (H, W // 2 + 1), dtype=np.complex128)
    out[..., rows, :m] = block
    return out


@lru_cache(maxsize=32)
def _pruned_matrices(H, W, rows, m):
    """DFT factors for the retained block.

    Returns the row factors (forward, inverse) and real column factors whose
    columns/rows interleave real and imaginary parts, so that complex results
    come out of a single real GEMM as ``view(complex128)``.
    """
    rows = np.asarray(rows)
    i = np.arange(H)
    j = np.arange(W)
    l = np.arange(m)
    # forward: exp(-2 pi i k i / H) for retained k, exp(-2 pi i l j / W) for l < m
    fx = np.exp(-2j * np.pi * ((np.outer(rows, i) % H) / H))
    fy = np.exp(-2j * np.pi * ((np.outer(j, l) % W) / W))
    fy_il = np.empty((W, 2 * m))
    fy_il[:, 0::2] = fy.real
    fy_il[:, 1::2] = fy.imag
    # inverse with Hermitian multiplicity and 1/(HW) folded into the column factor
    w = hermitian_column_weights(W)[:m]
    gx = np.conj(fx).T.copy()
    gy = np.conj(fy).T * (w / (H * W))[:, None]
    gy_il = np.empty((2 * m, W))
    gy_il[0::2] = gy.real
    gy_il[1::2] = -gy.imag
    return fx, fy_il, gx, gy_il


def _rows_apply(mat, x):
    """``mat @ x`` over the second-to-last axis of ``x``, as one GEMM."""
    lead = x.shape[:-2]
    n, c = x.shape[-2:]
    flat = np.moveaxis(x.reshape(-1, n, c), 1, 0).reshape(n, -1)
    out = (mat @ flat).reshape(mat.shape[0], -1, c)
    return np.moveaxis(out, 0, 1).reshape(lead + (mat.shape[0], c))


def rfft2_modes(x, rows, m):
    """``truncate_modes(rfft2(x), rows, m)`` evaluated directly for the retained block.

    Costs O(HW * m) per grid instead of a full transform.
    """
    x = np.asarray(x, dtype=np.float64)
    H, W = x.shape[-2:]
    if m > W // 2 + 1:
        raise BoundsError(f"{m} columns exceed the half spectrum of width {W}")
    fx, fy_il, _, _ = _pruned_matrices(H, W, tuple(int(r) for r in rows), m)
    t = (x.reshape(-1, W) @ fy_il).view(np.complex128).reshape(x.shape[:-1] + (m,))
    return _rows_apply(fx, t)


def irfft2_modes(block, rows, H, W):
    """``irfft2(scatter_modes(block, rows, H, W))`` for a block of retained modes."""
    block = np.asarray(block)
    m = block.shape[-1]
    if m > W // 2 + 1:
        raise BoundsError(f"{m} columns exceed the half spectrum of width {W}")
    _, _, gx, gy_il = _pruned_matrices(H, W, tuple(int(r) for r in rows), m)
    t = np.ascontiguousarray(_rows_apply(gx, block.astype(np.complex128, copy=False)))
    out = t.view(np.float64).reshape(-1, 2 * m) @ gy_il
    return out.reshape(block.shape[:-2] + (H, W))


def spectral_h2_weights(H, W):
    """Sobolev H2 weights (1 + kx^2 + ky^2)^2 on the full H x W spectrum."""
    kx = signed_frequencies(H)[:, None].astype(float)
    ky = signed_frequencies(W)[None, :].astype(float)
    return (1.0 + kx**2 + ky**2) ** 2
