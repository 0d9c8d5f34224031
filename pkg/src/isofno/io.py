"""
Binary dataset and checkpoint files.

Dataset (little-endian)::

    b"IFNO" | u32 version | u32 count | u32 height | u32 width
    count x ( a: height*width f64 | u: height*width f64 )

Checkpoint (little-endian)::

    b"IFNC" | u32 version | u32 variant (0 standard, 1 isotropic)
    | u32 width, modes, layers, in_channels, out_channels, projection_hidden, padding
    | f64 a_mean, a_std, u_mean, u_std | u64 parameter count
    | parameter count x f64

Parameters follow ``ModelParameters.to_vector``: lifting weight and bias,
then per layer the kernel (complex entries as interleaved real, imaginary)
or generator, W and b, then both projection stages.
"""

import struct

import numpy as np

from .darcy import DarcySample
from .errors import ConfigurationError, FormatError
from .model import ISOTROPIC, STANDARD, ModelConfig, count_parameters, init_parameters

__all__ = [
    "DATASET_MAGIC",
    "CHECKPOINT_MAGIC",
    "write_dataset",
    "read_dataset",
    "dataset_bytes",
    "parse_dataset",
    "write_checkpoint",
    "read_checkpoint",
    "checkpoint_bytes",
    "parse_checkpoint",
]

DATASET_MAGIC = b"IFNO"
CHECKPOINT_MAGIC = b"IFNC"
DATASET_VERSION = 1
CHECKPOINT_VERSION = 1

_DS_HEADER = struct.Struct("<4sIIII")
_CK_HEADER = struct.Struct("<4sIIIIIIIII4dQ")
_VARIANT_TAGS = {STANDARD: 0, ISOTROPIC: 1}
_TAG_VARIANTS = {v: k for k, v in _VARIANT_TAGS.items()}


def dataset_bytes(samples):
    samples = list(samples)
    if not samples:
        raise ValueError("cannot serialize an empty dataset")
    H, W = samples[0].a.shape
    parts = [_DS_HEADER.pack(DATASET_MAGIC, DATASET_VERSION, len(samples), H, W)]
    for s in samples:
        if s.a.shape != (H, W) or s.u.shape != (H, W):
            raise ValueError("all samples must share one resolution")
        parts.append(np.ascontiguousarray(s.a, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(s.u, dtype="<f8").tobytes())
    return b"".join(parts)


def parse_dataset(buf):
    if len(buf) < _DS_HEADER.size:
        raise FormatError("truncated dataset header", offset=len(buf))
    magic, version, count, H, W = _DS_HEADER.unpack_from(buf, 0)
    if magic != DATASET_MAGIC:
        raise FormatError(f"bad dataset magic {magic!r}", offset=0)
    if version != DATASET_VERSION:
        raise FormatError(f"unsupported dataset version {version}", offset=4)
    need = _DS_HEADER.size + count * 2 * H * W * 8
    if len(buf) < need:
        raise FormatError(f"dataset declares {count} samples but payload ends early", offset=len(buf))
    if len(buf) > need:
        raise FormatError("trailing bytes after dataset payload", offset=need)
    data = np.frombuffer(buf, dtype="<f8", offset=_DS_HEADER.size).reshape(count, 2, H, W)
    return [DarcySample(data[i, 0].astype(np.float64), data[i, 1].astype(np.float64)) for i in range(count)]


def write_dataset(path, samples):
    with open(path, "wb") as fh:
        fh.write(dataset_bytes(samples))


def read_dataset(path):
    with open(path, "rb") as fh:
        return parse_dataset(fh.read())


def checkpoint_bytes(cfg, params):
    vec = params.to_vector()
    if vec.size != count_parameters(cfg):
        raise ConfigurationError(f"parameters hold {vec.size} values, config needs {count_parameters(cfg)}")
    header = _CK_HEADER.pack(
        CHECKPOINT_MAGIC,
        CHECKPOINT_VERSION,
        _VARIANT_TAGS[cfg.variant],
        cfg.width,
        cfg.modes,
        cfg.layers,
        cfg.in_channels,
        cfg.out_channels,
        cfg.projection_hidden,
        cfg.padding,
        *params.normalization,
        vec.size,
    )
    return header + vec.astype("<f8").tobytes()


def parse_checkpoint(buf, expect=None):
    """Decode a checkpoint; ``expect`` (a ModelConfig) rejects mismatching files."""
    if len(buf) < _CK_HEADER.size:
        raise FormatError("truncated checkpoint header", offset=len(buf))
    magic, version, tag, width, modes, layers, c_in, c_out, hidden, pad, *rest = _CK_HEADER.unpack_from(buf, 0)
    if magic != CHECKPOINT_MAGIC:
        raise FormatError(f"bad checkpoint magic {magic!r}", offset=0)
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", offset=4)
    if tag not in _TAG_VARIANTS:
        raise FormatError(f"unknown variant tag {tag}", offset=8)
    norm, count = rest[:4], rest[4]
    cfg = ModelConfig(_TAG_VARIANTS[tag], width, modes, layers, c_in, c_out, hidden, pad)
    if count != count_parameters(cfg):
        raise FormatError(f"parameter count {count} disagrees with config ({count_parameters(cfg)})", offset=_CK_HEADER.size - 8)
    need = _CK_HEADER.size + 8 * count
    if len(buf) != need:
        raise FormatError(f"checkpoint payload is {len(buf) - _CK_HEADER.size} bytes, expected {8 * count}", offset=min(len(buf), need))
    if expect is not None and expect != cfg:
        raise ConfigurationError(f"checkpoint holds {cfg}, expected {expect}")
    vec = np.frombuffer(buf, dtype="<f8", offset=_CK_HEADER.size).astype(np.float64)
    template = init_parameters(cfg, 0)
    params = template.with_vector(vec).with_normalization(*norm)
    return cfg, params


def write_checkpoint(path, cfg, params):
    with open(path, "wb") as fh:
        fh.write(checkpoint_bytes(cfg, params))


def read_checkpoint(path, expect=None):
    with open(path, "rb") as fh:
        return parse_checkpoint(fh.read(), expect)
