"""
Fourier neural operator with standard or isotropic spectral kernels.

The network is ``u = Q(L_L(...L_1(P(a))))`` where each Fourier layer is

    v -> relu(W v + b + irfft2(R * rfft2(v)))

with ``R`` restricted to the retained low modes. The standard variant learns
a complex ``R`` on k_x in [-m, m-1], k_y in [0, m-1]. The isotropic variant
learns a real triangular generator and expands it into a D4-symmetric ``R``
on |k_x| <= m-1, which makes the whole network equivariant under
reflections, transposition and 90 degree rotations of the grid.

With ``padding > 0`` the lifted field is zero padded by that many points on
every side before the Fourier layers and cropped back before ``Q``. Symmetric
padding commutes with D4, so isotropic models stay exactly equivariant, but
circular translations of the input no longer commute with the model.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import spectral, symmetry
from .errors import ConfigurationError, ShapeError
from .grid import pointwise_affine, relu

__all__ = [
    "STANDARD",
    "ISOTROPIC",
    "ModelConfig",
    "LayerParameters",
    "ModelParameters",
    "init_parameters",
    "random_parameters",
    "count_parameters",
    "spectral_parameter_count",
    "fourier_layer",
    "mix_modes",
    "forward",
]

STANDARD = "standard"
ISOTROPIC = "isotropic"
_VARIANT_ALIASES = {"standard": STANDARD, "fno": STANDARD, "iso": ISOTROPIC, "isotropic": ISOTROPIC}


@dataclass(frozen=True)
class ModelConfig:
    variant: str = STANDARD
    width: int = 32
    modes: int = 16
    layers: int = 4
    in_channels: int = 1
    out_channels: int = 1
    projection_hidden: int = 128
    padding: int = 0

    def __post_init__(self):
        variant = _VARIANT_ALIASES.get(str(self.variant).lower())
        if variant is None:
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "variant", variant)
        for name in ("width", "modes", "layers", "in_channels", "out_channels", "projection_hidden"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if int(self.padding) < 0:
            raise ConfigurationError(f"padding must be non-negative, got {self.padding}")

    @property
    def isotropic(self):
        return self.variant == ISOTROPIC

    def retained_rows(self, H):
        return spectral.retained_rows(H, self.modes, symmetric=self.isotropic)

    def kernel_shape(self):
        d, m = self.width, self.modes
        if self.isotropic:
            return (d, d, symmetry.generator_size(m))
        return (d, d, 2 * m, m)

    def check_resolution(self, H, W):
        m = self.modes
        H, W = H + 2 * self.padding, W + 2 * self.padding
        if 2 * m > H or 2 * m > W:
            raise ConfigurationError(f"{m} modes need a resolution of at least {2 * m}, got {H}x{W}")


@dataclass
class LayerParameters:
    kernel: np.ndarray  # complex (d, d, 2m, m) or real generator (d, d, m(m+1)/2)
    w: np.ndarray
    b: np.ndarray


@dataclass
class ModelParameters:
    """Trainable arrays plus the (frozen) scalar normalization of inputs and outputs.

    The same container holds gradients, in which case the normalization
    scalars are carried along unchanged.
    """

    lift_w: np.ndarray
    lift_b: np.ndarray
    layers: list
    proj1_w: np.ndarray
    proj1_b: np.ndarray
    proj2_w: np.ndarray
    proj2_b: np.ndarray
    a_mean: float = 0.0
    a_std: float = 1.0
    u_mean: float = 0.0
    u_std: float = 1.0

    def arrays(self):
        """Trainable arrays in canonical order: P, per layer (kernel, W, b), then Q."""
        out = [self.lift_w, self.lift_b]
        for layer in self.layers:
            out += [layer.kernel, layer.w, layer.b]
        out += [self.proj1_w, self.proj1_b, self.proj2_w, self.proj2_b]
        return out

    @property
    def normalization(self):
        return (self.a_mean, self.a_std, self.u_mean, self.u_std)

    def to_vector(self):
        parts = []
        for arr in self.arrays():
            arr = np.ascontiguousarray(arr)
            parts.append(arr.view(np.float64).ravel() if np.iscomplexobj(arr) else arr.ravel())
        return np.concatenate(parts).astype(np.float64, copy=False)

    def with_vector(self, vec):
        """Copy of these parameters with trainable values taken from a flat vector."""
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.size,):
            raise ShapeError(f"vector has shape {vec.shape}, parameters need ({self.size},)")
        pos = 0
        new = []
        for arr in self.arrays():
            n = arr.size * (2 if np.iscomplexobj(arr) else 1)
            chunk = vec[pos : pos + n].copy()
            if np.iscomplexobj(arr):
                chunk = chunk.view(np.complex128)
            new.append(chunk.reshape(arr.shape))
            pos += n
        return self._from_arrays(new)

    def _from_arrays(self, arrays):
        it = iter(arrays)
        lift_w, lift_b = next(it), next(it)
        layers = [LayerParameters(next(it), next(it), next(it)) for _ in self.layers]
        p1w, p1b, p2w, p2b = next(it), next(it), next(it), next(it)
        return ModelParameters(lift_w, lift_b, layers, p1w, p1b, p2w, p2b, *self.normalization)

    def zeros_like(self):
        return self._from_arrays([np.zeros_like(a) for a in self.arrays()])

    def copy(self):
        return self._from_arrays([a.copy() for a in self.arrays()])

    def with_normalization(self, a_mean, a_std, u_mean, u_std):
        return replace(self, a_mean=float(a_mean), a_std=float(a_std), u_mean=float(u_mean), u_std=float(u_std))

    @property
    def size(self):
        return sum(a.size * (2 if np.iscomplexobj(a) else 1) for a in self.arrays())


def spectral_parameter_count(cfg):
    d, m = cfg.width, cfg.modes
    per_layer = symmetry.isotropic_spectral_count(d, d, m) if cfg.isotropic else symmetry.standard_spectral_count(d, d, m)
    return cfg.layers * per_layer


def count_parameters(cfg):
    """Exact number of free real scalars in a model built from ``cfg``."""
    d, h = cfg.width, cfg.projection_hidden
    lift = d * cfg.in_channels + d
    mixing = cfg.layers * (d * d + d)
    proj = (h * d + h) + (cfg.out_channels * h + cfg.out_channels)
    return spectral_parameter_count(cfg) + lift + mixing + proj


def _uniform(rng, shape, fan_in):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_parameters(cfg, seed=0):
    """Deterministic initialization; spectral weights are uniform on [0, 1/d^2)."""
    rng = np.random.default_rng(seed)
    d, h = cfg.width, cfg.projection_hidden
    scale = 1.0 / (d * d)
    lift_w = _uniform(rng, (d, cfg.in_channels), cfg.in_channels)
    lift_b = _uniform(rng, (d,), cfg.in_channels)
    layers = []
    for _ in range(cfg.layers):
        if cfg.isotropic:
            kernel = scale * rng.random(cfg.kernel_shape())
        else:
            shape = cfg.kernel_shape()
            kernel = scale * (rng.random(shape) + 1j * rng.random(shape))
        layers.append(LayerParameters(kernel, _uniform(rng, (d, d), d), _uniform(rng, (d,), d)))
    proj1_w = _uniform(rng, (h, d), d)
    proj1_b = _uniform(rng, (h,), d)
    proj2_w = _uniform(rng, (cfg.out_channels, h), h)
    proj2_b = _uniform(rng, (cfg.out_channels,), h)
    return ModelParameters(lift_w, lift_b, layers, proj1_w, proj1_b, proj2_w, proj2_b)


def random_parameters(cfg, seed=0):
    """Gaussian parameters with unit-gain scaling, used by the equivariance property tests.

    Affine weights and biases are N(0, 1/fan_in), spectral weights N(0, 1/d^2)
    per real component. Unlike ``init_parameters`` the spectral branch is as
    strong as the pointwise one, so symmetry violations of the standard
    kernel are clearly visible.
    """
    rng = np.random.default_rng(seed)
    d, h = cfg.width, cfg.projection_hidden

    def normal(shape, fan_in):
        return rng.standard_normal(shape) / np.sqrt(fan_in)

    lift_w, lift_b = normal((d, cfg.in_channels), cfg.in_channels), normal((d,), cfg.in_channels)
    layers = []
    for _ in range(cfg.layers):
        shape = cfg.kernel_shape()
        kernel = normal(shape, d * d)
        if not cfg.isotropic:
            kernel = kernel + 1j * normal(shape, d * d)
        layers.append(LayerParameters(kernel, normal((d, d), d), normal((d,), d)))
    return ModelParameters(
        lift_w, lift_b, layers, normal((h, d), d), normal((h,), d), normal((cfg.out_channels, h), h), normal((cfg.out_channels,), h)
    )


def dense_kernel(cfg, kernel, H):
    """The kernel as it multiplies the retained block: complex or real ``(d, d, K, m)``."""
    if cfg.isotropic:
        return symmetry.expand_generator(kernel, cfg.modes, cfg.retained_rows(H), H)
    return kernel


def _check_kernel(cfg, layer):
    if layer.kernel.shape != cfg.kernel_shape():
        raise ShapeError(f"kernel shape {layer.kernel.shape} does not match {cfg.variant} config {cfg.kernel_shape()}")


def mix_modes(kernel, modes):
    """Per-mode channel mixing ``out[..., o, k, l] = sum_i kernel[o, i, k, l] modes[..., i, k, l]``."""
    c_out, c_in, K, m = kernel.shape
    lead = modes.shape[:-3]
    s = modes.reshape(-1, c_in, K * m).transpose(2, 0, 1)  # (Km, N, i)
    r = kernel.reshape(c_out, c_in, K * m).transpose(2, 1, 0)  # (Km, i, o)
    out = np.matmul(s, r)  # (Km, N, o)
    return out.transpose(1, 2, 0).reshape(lead + (c_out, K, m))


def _activate(z, mask):
    if mask is None:
        return relu(z)
    return np.where(mask, z, 0.0)


def fourier_layer(v, kernel, w, b, rows, record=None, mask=None):
    """One Fourier layer on ``(..., C, H, W)`` with a dense retained-mode kernel ``(C_out, C, K, m)``.

    ``rows`` are the FFT row indices of the kernel's K rows. When ``record`` is
    a dict, the intermediates needed for the backward pass are stored in it.
    ``mask`` replaces the relu by a fixed 0/1 gate (used for finite differences
    on a fixed activation pattern).
    """
    v = np.asarray(v, dtype=np.float64)
    H, W = v.shape[-2:]
    m = kernel.shape[-1]
    if kernel.shape[1] != v.shape[-3] or kernel.shape[-2] != len(rows):
        raise ShapeError(f"kernel {kernel.shape} does not fit field {v.shape} with {len(rows)} rows")
    modes = spectral.rfft2_modes(v, rows, m)
    mixed = mix_modes(kernel, modes)
    z = spectral.irfft2_modes(mixed, rows, H, W) + pointwise_affine(v, w, b)
    if record is not None:
        record["input"] = v
        record["modes"] = modes
        record["preact"] = z
    return _activate(z, mask)


def _as_batch(cfg, a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 2 and cfg.in_channels == 1:
        return a[None, None], 2
    if a.ndim == 3:
        return a[None], 3
    if a.ndim == 4:
        return a, 4
    raise ShapeError(f"cannot interpret input of shape {a.shape}")


def _restore(u, ndim):
    if ndim == 4:
        return u
    if ndim == 3:
        return u[0]
    return u[0, 0]


def _run(cfg, params, a, tape=None, masks=None):
    x, ndim = _as_batch(cfg, a)
    if x.shape[1] != cfg.in_channels:
        raise ShapeError(f"input has {x.shape[1]} channels, model expects {cfg.in_channels}")
    cfg.check_resolution(*x.shape[-2:])
    if len(params.layers) != cfg.layers:
        raise ConfigurationError(f"parameters hold {len(params.layers)} layers, config expects {cfg.layers}")
    x = (x - params.a_mean) / params.a_std
    v = pointwise_affine(x, params.lift_w, params.lift_b)
    pad = cfg.padding
    if pad:
        v = np.pad(v, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    H, W = v.shape[-2:]
    rows = cfg.retained_rows(H)
    records = []
    for l, layer in enumerate(params.layers):
        _check_kernel(cfg, layer)
        rec = {} if tape is not None else None
        mask = None if masks is None else masks[l]
        v = fourier_layer(v, dense_kernel(cfg, layer.kernel, H), layer.w, layer.b, rows, rec, mask)
        records.append(rec)
    if pad:
        v = v[..., pad:-pad, pad:-pad]
    hidden_pre = pointwise_affine(v, params.proj1_w, params.proj1_b)
    hidden = _activate(hidden_pre, None if masks is None else masks[-1])
    y = pointwise_affine(hidden, params.proj2_w, params.proj2_b)
    u = y * params.u_std + params.u_mean
    if tape is not None:
        tape.update(
            config=cfg,
            params=params,
            input_ndim=ndim,
            rows=rows,
            shape=(H, W),
            normalized_input=x,
            layers=records,
            last_hidden=v,
            proj_preact=hidden_pre,
            proj_hidden=hidden,
            batch=x.shape[0],
        )
    return _restore(u, ndim)


def forward(cfg, params, a):
    """Evaluate the operator on ``(H, W)``, ``(C, H, W)`` or ``(B, C, H, W)`` input.

    The output has the same leading layout with ``out_channels`` channels.
    """
    return _run(cfg, params, a)
