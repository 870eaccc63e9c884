import struct

import numpy as np
import pytest

from anchscgan.errors import ModelFormatError
from anchscgan.gan import generate_minority
from anchscgan.model_io import MAGIC, expected_size, load_model, model_bytes, model_from_bytes, save_model
from anchscgan.nn import forward
from toys import small_model


def _nets(model):
    return (model.discriminator, model.gen_min, model.gen_maj, model.prior.net)


def test_round_trip_preserves_forward_outputs(tmp_path):
    model, _, _ = small_model(1, jitter=True)
    path = str(tmp_path / "m.bin")
    save_model(model, path)
    back = load_model(path)
    rng = np.random.default_rng(0)
    for a, b in zip(_nets(model), _nets(back)):
        x = rng.normal(size=(100, a.input_dim))
        assert np.array_equal(forward(a, x)[-1], forward(b, x)[-1])
    assert np.array_equal(back.scaler.minimum, model.scaler.minimum)
    assert np.array_equal(back.centroids.majority_centroids, model.centroids.majority_centroids)
    assert back.prior.frozen
    assert back.config.hidden == model.config.hidden and back.config.noise_dim == model.config.noise_dim
    assert np.array_equal(generate_minority(model, 7, 3), generate_minority(back, 7, 3))
    assert model_bytes(back) == model_bytes(model)


def test_size_matches_parameter_count():
    model, _, _ = small_model(2, d=4, hidden=(7, 5, 3), noise_dim=6, c=2)
    params = sum(p.size for net in _nets(model) for p in net.parameters())
    layers = sum(len(net.layers) for net in _nets(model))
    c_min, c_maj = len(model.centroids.minority_centroids), len(model.centroids.majority_centroids)
    literal = 8 + 3 * 4 + 4 * 4 + layers * 12 + params * 8 + 2 * 4 * 8 + 2 * 4 + (c_min + c_maj) * 4 * 8
    assert len(model_bytes(model)) == literal == expected_size(4, 6, (7, 5, 3), c_min, c_maj)


def test_header_is_little_endian():
    model, _, _ = small_model(0, d=3, noise_dim=5)
    buf = model_bytes(model)
    assert buf[:8] == MAGIC
    assert struct.unpack("<III", buf[8:20]) == (1, 3, 5)


def test_bad_magic_version_truncation_trailing():
    model, _, _ = small_model(0)
    buf = model_bytes(model)
    with pytest.raises(ModelFormatError, match="magic"):
        model_from_bytes(b"NOTAMODL" + buf[8:])
    with pytest.raises(ModelFormatError, match="version"):
        model_from_bytes(buf[:8] + struct.pack("<I", 2) + buf[12:])
    for cut in (4, 20, len(buf) // 2, len(buf) - 1):
        with pytest.raises(ModelFormatError, match="truncated"):
            model_from_bytes(buf[:cut])
    with pytest.raises(ModelFormatError, match="trailing"):
        model_from_bytes(buf + b"\0")


def test_header_dimension_mismatch():
    model, _, _ = small_model(0, d=3)
    buf = bytearray(model_bytes(model))
    buf[12:16] = struct.pack("<I", 4)
    with pytest.raises(ModelFormatError):
        model_from_bytes(bytes(buf))


def test_load_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_model(str(tmp_path / "none.bin"))
