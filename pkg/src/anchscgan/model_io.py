"""Binary model file.

Layout (all integers unsigned 32-bit little-endian, floats float64 little-endian)::

    magic      8 bytes  b"ANCHGAN1"
    version    u32
    d          u32
    noise_dim  u32
    4 networks in order: discriminator, minority generator, majority generator, prior
        n_layers u32
        per layer: fan_in u32, fan_out u32, activation u32,
                   weights (fan_out*fan_in, row-major), bias (fan_out)
    scaler     min (d), max (d)
    centroids  c_min u32, c_maj u32, minority (c_min*d), majority (c_maj*d)
"""

import struct

import numpy as np

from .clusters import CentroidSet
from .data import Scaler
from .errors import ModelFormatError
from .gan import GanConfig, GanModel
from .nn import Dense, Network
from .prior import PriorClassifier

MAGIC = b"ANCHGAN1"
VERSION = 1
ACTIVATION_CODES = {"linear": 0, "relu": 1, "sigmoid": 2}
_CODE_NAMES = {v: k for k, v in ACTIVATION_CODES.items()}
_F8 = np.dtype("<f8")


def _u32(*vals):
    return struct.pack("<" + "I" * len(vals), *vals)


def _floats(arr):
    return np.ascontiguousarray(arr, dtype=_F8).tobytes()


def _network_bytes(net):
    out = [_u32(len(net.layers))]
    for layer in net.layers:
        out.append(_u32(layer.fan_in, layer.fan_out, ACTIVATION_CODES[layer.activation]))
        out.append(_floats(layer.weights))
        out.append(_floats(layer.bias))
    return b"".join(out)


def model_bytes(model):
    parts = [MAGIC, _u32(VERSION, model.d, model.noise_dim)]
    for net in (model.discriminator, model.gen_min, model.gen_maj, model.prior.net):
        parts.append(_network_bytes(net))
    parts.append(_floats(model.scaler.minimum))
    parts.append(_floats(model.scaler.maximum))
    c = model.centroids
    parts.append(_u32(len(c.minority_centroids), len(c.majority_centroids)))
    parts.append(_floats(c.minority_centroids))
    parts.append(_floats(c.majority_centroids))
    return b"".join(parts)


def expected_size(d, noise_dim, hidden, c_min, c_maj):
    """File size in bytes for the given dimensions."""
    def net_size(sizes):
        n = 4
        for a, b in zip(sizes[:-1], sizes[1:]):
            n += 12 + 8 * (a * b + b)
        return n

    size = len(MAGIC) + 12
    size += net_size([2 * d, *hidden, 1])
    size += 2 * net_size([noise_dim, *hidden, d])
    size += net_size([d, 2 * d, 4 * d, d, 1])
    size += 16 * d + 8 + 8 * d * (c_min + c_maj)
    return size


def save_model(model, path):
    with open(path, "wb") as fh:
        fh.write(model_bytes(model))


class _Reader:
    def __init__(self, buf):
        self.buf = buf
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.buf):
            raise ModelFormatError("model file is truncated")
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self, count=1):
        vals = struct.unpack("<" + "I" * count, self.take(4 * count))
        return vals if count > 1 else vals[0]

    def floats(self, count, shape=None):
        arr = np.frombuffer(self.take(8 * count), dtype=_F8).astype(np.float64)
        return arr.reshape(shape) if shape is not None else arr


def _read_network(r):
    layers = []
    for _ in range(r.u32()):
        fan_in, fan_out, code = r.u32(3)
        if code not in _CODE_NAMES:
            raise ModelFormatError(f"unknown activation code {code}")
        w = r.floats(fan_in * fan_out, (fan_out, fan_in))
        b = r.floats(fan_out)
        layers.append(Dense(w, b, _CODE_NAMES[code]))
    if not layers:
        raise ModelFormatError("network with no layers")
    return Network(layers)


def model_from_bytes(buf, config=None):
    r = _Reader(buf)
    if r.take(len(MAGIC)) != MAGIC:
        raise ModelFormatError("bad magic: not an Anch-SCGAN model file")
    version = r.u32()
    if version != VERSION:
        raise ModelFormatError(f"unsupported model version {version}")
    d, noise_dim = r.u32(2)
    D, g_min, g_maj, prior_net = (_read_network(r) for _ in range(4))
    scaler = Scaler(r.floats(d), r.floats(d))
    c_min, c_maj = r.u32(2)
    cent = CentroidSet(r.floats(c_min * d, (c_min, d)), r.floats(c_maj * d, (c_maj, d)),
                       max(c_min, c_maj), float("nan"), float("nan"))
    if r.pos != len(buf):
        raise ModelFormatError("trailing bytes after model data")
    if prior_net.input_dim != d or g_min.input_dim != noise_dim:
        raise ModelFormatError("network dimensions disagree with header")
    prior_net.freeze()
    if config is None:
        hidden = tuple(layer.fan_out for layer in D.layers[:-1])
        config = GanConfig(noise_dim=noise_dim, hidden=hidden)
    try:
        return GanModel(D, g_min, g_maj, PriorClassifier(prior_net), scaler, cent, config)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def load_model(path, config=None):
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read(), config)
