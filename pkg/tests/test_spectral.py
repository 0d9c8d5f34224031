import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isofno import spectral
from isofno.errors import BoundsError
from isofno.grid import GroupElement, apply_group

rng = np.random.default_rng(0)


def _random(shape, complex_=True):
    x = rng.standard_normal(shape)
    return x + 1j * rng.standard_normal(shape) if complex_ else x


def test_constant_grid():
    X = spectral.fft2(np.full((8, 8), 2.5))
    assert X[0, 0] == pytest.approx(2.5 * 64)
    X[0, 0] = 0
    assert np.abs(X).max() < 1e-12


def test_unit_impulse():
    x = np.zeros((8, 16))
    x[0, 0] = 1
    np.testing.assert_allclose(spectral.fft2(x), np.ones((8, 16)), atol=1e-14)


def test_cosine_pair():
    H, W = 32, 16
    x = np.cos(2 * np.pi * np.arange(H) / H)[:, None] * np.ones((1, W))
    X = spectral.fft2(x)
    assert abs(X[1, 0] - H * W / 2) < 1e-9
    assert abs(X[H - 1, 0] - H * W / 2) < 1e-9
    X[1, 0] = X[H - 1, 0] = 0
    assert np.abs(X).max() < 1e-9


def test_matches_naive_dft():
    x = _random((16, 16))
    ref = spectral.dft2_naive(x)
    assert np.abs(spectral.fft2(x) - ref).max() / np.abs(ref).max() < 1e-10


def test_naive_dft_against_numpy():
    # independent check of the oracle itself
    x = _random((6, 10))
    np.testing.assert_allclose(spectral.dft2_naive(x), np.fft.fft2(x), atol=1e-10)


@pytest.mark.parametrize("shape", [(64, 64), (128, 128), (8, 32)])
def test_round_trip(shape):
    x = _random(shape)
    assert np.abs(spectral.ifft2(spectral.fft2(x)) - x).max() < 1e-10


def test_non_power_of_two_falls_back():
    x = _random((12, 10))
    np.testing.assert_allclose(spectral.fft2(x), spectral.dft2_naive(x), atol=1e-10)


def test_parseval():
    x = _random((64, 64), complex_=False)
    e = np.sum(x**2)
    assert abs(np.sum(np.abs(spectral.fft2(x)) ** 2) / x.size - e) / e < 1e-9


def test_linearity():
    x, y = _random((16, 16)), _random((16, 16))
    lhs = spectral.fft2(2.0 * x - 3j * y)
    np.testing.assert_allclose(lhs, 2.0 * spectral.fft2(x) - 3j * spectral.fft2(y), atol=1e-11)


def test_real_input_is_hermitian():
    X = spectral.fft2(_random((16, 16), complex_=False))
    neg = np.roll(X[::-1, ::-1], 1, axis=(0, 1))  # X[-k, -l]
    np.testing.assert_allclose(X, np.conj(neg), atol=1e-11)


def test_transpose_acts_on_spectrum():
    x = _random((16, 16), complex_=False)
    np.testing.assert_allclose(spectral.fft2(apply_group(GroupElement.TRANSPOSE, x)), spectral.fft2(x).T, atol=1e-11)


def test_rfft2_shape_and_inverse():
    x = _random((128, 128), complex_=False)
    s = spectral.rfft2(x)
    assert s.shape == (128, 65)
    assert np.abs(spectral.irfft2(s, 128) - x).max() < 1e-12
    np.testing.assert_allclose(s, np.fft.rfft2(x), atol=1e-9)


def test_hermitian_weights():
    np.testing.assert_array_equal(spectral.hermitian_column_weights(8), [1, 2, 2, 2, 1])
    np.testing.assert_array_equal(spectral.hermitian_column_weights(7), [1, 2, 2, 2])


def test_retained_rows():
    np.testing.assert_array_equal(spectral.retained_rows(16, 3, symmetric=False), [0, 1, 2, 13, 14, 15])
    np.testing.assert_array_equal(spectral.retained_rows(16, 3, symmetric=True), [0, 1, 2, 14, 15])
    with pytest.raises(BoundsError):
        spectral.retained_rows(16, 9, symmetric=False)


def test_truncate_retains_iso_block():
    s = spectral.rfft2(_random((128, 128), complex_=False))
    rows = spectral.retained_rows(128, 16, symmetric=True)
    assert spectral.truncate_modes(s, rows, 16).shape == (31, 16)


def test_truncate_scatter_band_limited():
    H = W = 32
    rows = spectral.retained_rows(H, 5, symmetric=True)

    def project(x):
        return spectral.irfft2(spectral.scatter_modes(spectral.truncate_modes(spectral.rfft2(x), rows, 5), rows, H, W), W)

    field = project(_random((H, W), complex_=False))
    np.testing.assert_allclose(project(field), field, atol=1e-13)
    block = np.zeros((len(rows), 5), dtype=complex)
    assert not spectral.irfft2(spectral.scatter_modes(block, rows, H, W), W).any()


@pytest.mark.parametrize("symmetric", [False, True])
def test_pruned_transforms_match_full(symmetric):
    H, W, m = 32, 64, 7
    rows = spectral.retained_rows(H, m, symmetric)
    x = _random((2, 3, H, W), complex_=False)
    full = spectral.truncate_modes(spectral.rfft2(x), rows, m)
    np.testing.assert_allclose(spectral.rfft2_modes(x, rows, m), full, atol=1e-10)
    block = _random((2, 3, len(rows), m))
    ref = spectral.irfft2(spectral.scatter_modes(block, rows, H, W), W)
    np.testing.assert_allclose(spectral.irfft2_modes(block, rows, H, W), ref, atol=1e-12)


def test_h2_weights():
    w = spectral.spectral_h2_weights(16, 16)
    assert w[0, 0] == 1
    assert w[1, 0] == 4
    assert w[3, 4] == 676
    assert w[-3, -4] == 676


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_round_trip_property(p, q, seed):
    x = np.random.default_rng(seed).standard_normal((2**p, 2**q))
    assert np.abs(spectral.irfft2(spectral.rfft2(x), 2**q) - x).max() < 1e-10
    assert np.abs(spectral.fft2(x) - np.fft.fft2(x)).max() < 1e-9 * max(1.0, np.abs(x).sum())
