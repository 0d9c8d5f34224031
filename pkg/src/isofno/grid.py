"""
Grid containers and the D4 spatial actions.

Grids are plain float64 numpy arrays: a scalar grid is ``(H, W)``, a channel
field is ``(C, H, W)`` and a batch of fields is ``(B, C, H, W)``. Every
function here acts on the trailing two (spatial) axes and leaves leading
axes alone.
"""

from enum import Enum

import numpy as np

from .errors import ShapeError

__all__ = ["GroupElement", "D4", "apply_group", "compose", "inverse", "translate", "pointwise_affine", "relu"]


class GroupElement(str, Enum):
    IDENTITY = "identity"
    FLIP_X = "flip-x"
    FLIP_Y = "flip-y"
    TRANSPOSE = "transpose"
    ROT90 = "rot90"
    ROT180 = "rot180"
    ROT270 = "rot270"
    ANTI_TRANSPOSE = "anti-transpose"

    @property
    def swaps_axes(self):
        return self in _SWAPPING

    @classmethod
    def parse(cls, tag):
        if isinstance(tag, cls):
            return tag
        if tag in (None, "none"):
            return cls.IDENTITY
        return cls(tag)


D4 = tuple(GroupElement)

_SWAPPING = {GroupElement.TRANSPOSE, GroupElement.ROT90, GroupElement.ROT270, GroupElement.ANTI_TRANSPOSE}

# Integer matrix A_g acting on centred pixel coordinates: g(x)(p) = x(A_g p).
_MATRIX = {
    GroupElement.IDENTITY: ((1, 0), (0, 1)),
    GroupElement.FLIP_X: ((-1, 0), (0, 1)),
    GroupElement.FLIP_Y: ((1, 0), (0, -1)),
    GroupElement.TRANSPOSE: ((0, 1), (1, 0)),
    GroupElement.ROT90: ((0, 1), (-1, 0)),
    GroupElement.ROT180: ((-1, 0), (0, -1)),
    GroupElement.ROT270: ((0, -1), (1, 0)),
    GroupElement.ANTI_TRANSPOSE: ((0, -1), (-1, 0)),
}
_FROM_MATRIX = {m: g for g, m in _MATRIX.items()}


def _matmul2(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def compose(g, h):
    """The element ``g∘h``, i.e. apply ``h`` first and then ``g``."""
    g, h = GroupElement.parse(g), GroupElement.parse(h)
    # g(h(x))(p) = h(x)(A_g p) = x(A_h A_g p)
    return _FROM_MATRIX[_matmul2(_MATRIX[h], _MATRIX[g])]


def inverse(g):
    g = GroupElement.parse(g)
    for h in D4:
        if compose(g, h) is GroupElement.IDENTITY:
            return h
    raise AssertionError("D4 table is not closed")  # pragma: no cover


def apply_group(g, x):
    """Apply a D4 element to the trailing two axes of ``x``.

    Reflections are array reversals (i -> H-1-i). Elements that swap the axes
    need a square grid.
    """
    g = GroupElement.parse(g)
    x = np.asarray(x)
    if x.ndim < 2:
        raise ShapeError(f"expected a grid, got shape {x.shape}")
    if g.swaps_axes and x.shape[-1] != x.shape[-2]:
        raise ShapeError(f"{g.value} needs a square grid, got {x.shape[-2]}x{x.shape[-1]}")
    (a, b), (c, d) = _MATRIX[g]
    if b == 0:
        out = x
        if a < 0:
            out = out[..., ::-1, :]
        if d < 0:
            out = out[..., :, ::-1]
        return out.copy()
    # out(p_i, p_j) = x(b p_j, c p_i) = x^T(c p_i, b p_j)
    out = np.swapaxes(x, -1, -2)
    if c < 0:
        out = out[..., ::-1, :]
    if b < 0:
        out = out[..., :, ::-1]
    return out.copy()


def translate(x, shift):
    """Circular translation by ``shift = (di, dj)`` pixels."""
    return np.roll(np.asarray(x), shift, axis=(-2, -1))


def pointwise_affine(x, M, b):
    """Per-pixel channel map ``out[o] = sum_i M[o, i] x[i] + b[o]``.

    Works on ``(C, H, W)`` fields and ``(B, C, H, W)`` batches.
    """
    x = np.asarray(x, dtype=np.float64)
    M = np.asarray(M, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if x.ndim < 3:
        raise ShapeError(f"expected a channel field, got shape {x.shape}")
    if M.ndim != 2 or M.shape[1] != x.shape[-3]:
        raise ShapeError(f"matrix {M.shape} does not act on {x.shape[-3]} channels")
    if b.shape != (M.shape[0],):
        raise ShapeError(f"bias {b.shape} does not match {M.shape[0]} output channels")
    H, W = x.shape[-2:]
    flat = x.reshape(x.shape[:-3] + (x.shape[-3], H * W))
    out = M @ flat + b[:, None]
    return out.reshape(x.shape[:-3] + (M.shape[0], H, W))


def relu(x):
    return np.maximum(x, 0.0)
