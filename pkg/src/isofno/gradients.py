"""
Reverse-mode gradients of the Fourier neural operator.

The adjoint is written out by hand for the fixed architecture. Two pieces
deserve care:

* The retained-mode transforms. With complex cotangents written as
  ``dL/dRe + i dL/dIm``, the adjoint of ``irfft2`` maps a real cotangent
  ``g`` to ``w_l * rfft2(g) / (H W)`` and the adjoint of ``rfft2`` maps a
  mode cotangent ``G`` to ``H W * irfft2(G / w_l)``, where ``w_l`` is the
  Hermitian column multiplicity (1 for k_y = 0 and Nyquist, 2 otherwise).
* Isotropic kernels: the cotangent of the dense real kernel is folded back
  onto the generator by summing over each orbit.
"""

import numpy as np

from . import spectral, symmetry
from .errors import StateError
from .model import _run, dense_kernel, mix_modes

__all__ = ["Tape", "forward_with_tape", "backward", "loss_and_gradient", "relative_l2_loss", "grad_check"]


class Tape:
    """Primal intermediates of one forward evaluation."""

    def __init__(self, values):
        self._values = values

    def __getitem__(self, key):
        return self._values[key]

    @property
    def config(self):
        return self._values["config"]

    @property
    def params(self):
        return self._values["params"]

    def activation_masks(self):
        """Relu gates of every layer and of the projection, as recorded."""
        return [rec["preact"] > 0 for rec in self._values["layers"]] + [self._values["proj_preact"] > 0]

    def nbytes(self):
        total = 0
        for rec in self._values["layers"]:
            total += sum(a.nbytes for a in rec.values())
        return total


def forward_with_tape(cfg, params, a):
    values = {}
    u = _run(cfg, params, a, tape=values)
    return u, Tape(values)


def _affine_backward(x, w, g_out):
    """Cotangents of ``y = w x + b`` (per pixel) for ``x`` of shape (B, C, H, W)."""
    B, C, H, W = x.shape
    xf = x.reshape(B, C, H * W)
    gf = g_out.reshape(B, g_out.shape[1], H * W)
    gw = np.matmul(gf, xf.transpose(0, 2, 1)).sum(axis=0)
    gb = gf.sum(axis=(0, 2))
    gx = (w.T @ gf).reshape(B, C, H, W)
    return gx, gw, gb


def _spectral_backward(cfg, kernel, rec, gz, rows, H, W):
    """Cotangents of the spectral branch w.r.t. its input field and its kernel parameters."""
    m = cfg.modes
    weights = spectral.hermitian_column_weights(W)[:m]
    g_mixed = spectral.rfft2_modes(gz, rows, m) * (weights / (H * W))
    modes = rec["modes"]
    c_out, c_in, K, _ = kernel.shape
    gm = g_mixed.reshape(-1, c_out, K * m).transpose(2, 1, 0)  # (Km, o, B)
    sm = np.conj(modes).reshape(-1, c_in, K * m).transpose(2, 0, 1)  # (Km, B, i)
    g_kernel = np.matmul(gm, sm).transpose(1, 2, 0).reshape(kernel.shape)
    # adjoint of the mixing: conj(kernel)^T applied per mode
    g_modes = mix_modes(np.conj(kernel).transpose(1, 0, 2, 3), g_mixed)
    g_input = (H * W) * spectral.irfft2_modes(g_modes / weights, rows, H, W)
    if cfg.isotropic:
        g_param = symmetry.fold_kernel_cotangent(g_kernel.real, m, rows, H)
    else:
        g_param = g_kernel
    return g_input, g_param


def backward(tape, cotangent):
    """Gradient of ``<cotangent, prediction>`` with respect to every trainable parameter.

    Returns a ``ModelParameters`` holding the cotangents.
    """
    cfg, params = tape.config, tape.params
    H, W = tape["shape"]
    rows = tape["rows"]
    g = np.asarray(cotangent, dtype=np.float64)
    ndim = tape["input_ndim"]
    if ndim == 2:
        g = g[None, None]
    elif ndim == 3:
        g = g[None]
    expected = (tape["batch"], cfg.out_channels, H - 2 * cfg.padding, W - 2 * cfg.padding)
    if g.shape != expected:
        raise StateError(f"cotangent shape {g.shape} does not match recorded prediction {expected}")

    grads = params.zeros_like()
    gy = g * params.u_std
    g_hidden, grads.proj2_w, grads.proj2_b = _affine_backward(tape["proj_hidden"], params.proj2_w, gy)
    g_hidden_pre = g_hidden * (tape["proj_preact"] > 0)
    gv, grads.proj1_w, grads.proj1_b = _affine_backward(tape["last_hidden"], params.proj1_w, g_hidden_pre)
    pad = cfg.padding
    if pad:
        gv = np.pad(gv, ((0, 0), (0, 0), (pad, pad), (pad, pad)))

    for layer, rec, glayer in zip(reversed(params.layers), reversed(tape["layers"]), reversed(grads.layers)):
        if rec is None:
            raise StateError("tape carries no layer records")
        gz = gv * (rec["preact"] > 0)
        kernel = dense_kernel(cfg, layer.kernel, H)
        g_spec_in, glayer.kernel = _spectral_backward(cfg, kernel, rec, gz, rows, H, W)
        g_aff_in, glayer.w, glayer.b = _affine_backward(rec["input"], layer.w, gz)
        gv = g_spec_in + g_aff_in

    if pad:
        gv = gv[..., pad:-pad, pad:-pad]
    _, grads.lift_w, grads.lift_b = _affine_backward(tape["normalized_input"], params.lift_w, gv)
    return grads


def relative_l2_loss(pred, target):
    """Mean over the batch of per-sample relative L2 errors, and its cotangent w.r.t. ``pred``.

    ``pred`` and ``target`` are ``(B, C, H, W)``; each sample's norm runs over
    all of its channels and pixels.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    B = pred.shape[0]
    diff = (pred - target).reshape(B, -1)
    tnorm = np.linalg.norm(target.reshape(B, -1), axis=1)
    dnorm = np.linalg.norm(diff, axis=1)
    per_sample = dnorm / tnorm
    safe = np.where(dnorm > 0, dnorm, 1.0)
    cot = diff / (safe * tnorm)[:, None] / B
    return float(per_sample.mean()), cot.reshape(pred.shape)


def loss_and_gradient(cfg, params, a, u):
    """Training loss on a batch ``a, u`` of shape (B, C, H, W) and its parameter gradient."""
    pred, tape = forward_with_tape(cfg, params, a)
    loss, cot = relative_l2_loss(pred, u)
    return loss, backward(tape, cot)


def grad_check(cfg, params, a, target, eps=1e-4):
    """Worst relative gradient error over the parameter arrays.

    For each array (lifting weight, a layer kernel, ...) the error is
    max |analytic - numeric| / max |numeric|. Normalizing per array rather
    than per entry keeps entries that vanish up to rounding from dominating,
    while small tensors such as spectral kernels are not swamped by large ones.

    The numeric derivative is a central difference of the training loss with
    the relu gates held at their pattern at ``params``. Away from kinks this
    is the plain central difference; when a +-eps step would flip a gate, it
    stays on the branch whose derivative the adjoint computes.
    """
    a = np.asarray(a, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    pred, tape = forward_with_tape(cfg, params, a)
    _, cot = relative_l2_loss(pred, target)
    analytic = backward(tape, cot).to_vector()
    masks = tape.activation_masks()
    theta = params.to_vector()
    numeric = np.empty_like(theta)
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = eps
        up, _ = relative_l2_loss(_run(cfg, params.with_vector(theta + step), a, masks=masks), target)
        down, _ = relative_l2_loss(_run(cfg, params.with_vector(theta - step), a, masks=masks), target)
        numeric[i] = (up - down) / (2 * eps)
    worst = 0.0
    for an, nu in zip(params.with_vector(analytic).arrays(), params.with_vector(numeric).arrays()):
        err, scale = np.abs(an - nu).max(), np.abs(nu).max()
        worst = max(worst, err / scale if scale > 0 else err)
    return float(worst)
