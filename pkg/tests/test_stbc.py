"""Unit tests for the 2x2 Alamouti algebra and block detection."""
import math

import numpy as np
import pytest

from dstbc_ofdm import (
    AlamoutiMatrix,
    alamouti_encode,
    coherent_detect,
    differential_encode,
    ml_differential_detect,
    psk_constellation,
)
from dstbc_ofdm.stbc import coherent_detect_indices, ml_differential_detect_indices

from conftest import random_alamouti, random_unitary_alamouti

_SQRT2 = math.sqrt(2.0)


def test_matrix_layout():
    m = AlamoutiMatrix(1 + 2j, 3 - 1j)
    expected = np.array([[1 + 2j, 3 - 1j], [-3 - 1j, 1 - 2j]])
    np.testing.assert_array_equal(m.matrix, expected)


def test_identity():
    np.testing.assert_array_equal(AlamoutiMatrix.identity().matrix, np.eye(2))


def test_algebra_matches_explicit_matrices(rng):
    for _ in range(200):
        x = random_alamouti(rng)
        y = random_alamouti(rng)
        np.testing.assert_allclose((x @ y).matrix, x.matrix @ y.matrix, atol=1e-12)
        np.testing.assert_allclose((x + y).matrix, x.matrix + y.matrix, atol=1e-12)
        np.testing.assert_allclose((x - y).matrix, x.matrix - y.matrix, atol=1e-12)
        np.testing.assert_allclose(x.hermitian().matrix, x.matrix.conj().T, atol=1e-12)
        np.testing.assert_allclose(x.conjugate().matrix, x.matrix.conj(), atol=1e-12)
        np.testing.assert_allclose(x.scaled(0.5).matrix, 0.5 * x.matrix, atol=1e-12)
        c = complex(rng.standard_normal() + 1j * rng.standard_normal())
        diag = np.diag([c, c.conjugate()])
        np.testing.assert_allclose(x.diag_mul(c).matrix, diag @ x.matrix, atol=1e-12)
        assert x.frobenius() == pytest.approx(np.linalg.norm(x.matrix), rel=1e-12)


def test_scaled_rejects_complex_factor():
    with pytest.raises(TypeError):
        AlamoutiMatrix(1.0, 0.0).scaled(1j)


def test_orthogonality_identity(rng):
    # M^H M is always a scaled identity, the defining Alamouti property
    for _ in range(50):
        m = random_alamouti(rng)
        product = m.hermitian() @ m
        assert product.b == pytest.approx(0.0, abs=1e-12)
        assert product.a == pytest.approx(abs(m.a) ** 2 + abs(m.b) ** 2, rel=1e-12)


def test_encode_is_plain_packing():
    m = alamouti_encode(0.5 + 0.5j, -1j)
    assert m.a == 0.5 + 0.5j and m.b == -1j


def test_differential_encode_is_raw_product(rng):
    prev = random_unitary_alamouti(rng)
    info = alamouti_encode(1j, -1.0)
    np.testing.assert_allclose(
        differential_encode(prev, info).matrix, prev.matrix @ info.matrix, atol=1e-12
    )


def test_differential_chain_stays_unitary(rng):
    order = 8
    c = psk_constellation(order)
    s = AlamoutiMatrix.identity()
    for _ in range(100):
        info = alamouti_encode(
            c.points[rng.integers(order)], c.points[rng.integers(order)]
        )
        s = differential_encode(s, info).scaled(1.0 / _SQRT2)
    np.testing.assert_allclose((s @ s.hermitian()).matrix, np.eye(2), atol=1e-10)


@pytest.mark.parametrize("order", [2, 4, 8, 16])
def test_differential_detect_recovers_noiseless_info(order, rng):
    c = psk_constellation(order)
    for _ in range(100):
        channel = random_alamouti(rng)
        s_k = random_unitary_alamouti(rng)
        i1, i2 = rng.integers(order), rng.integers(order)
        info = alamouti_encode(c.points[i1], c.points[i2])
        z_k = channel @ s_k
        z_next = z_k @ info.scaled(1.0 / _SQRT2)
        assert ml_differential_detect_indices(z_k, z_next, c) == (i1, i2)
        detected = ml_differential_detect(z_k, z_next, c)
        np.testing.assert_allclose(detected.matrix, info.matrix, atol=1e-12)


@pytest.mark.parametrize("order", [2, 4, 8, 16])
def test_coherent_detect_recovers_noiseless_info(order, rng):
    c = psk_constellation(order)
    for _ in range(100):
        channel = random_alamouti(rng)
        i1, i2 = rng.integers(order), rng.integers(order)
        info = alamouti_encode(c.points[i1], c.points[i2])
        z = channel @ info.scaled(1.0 / _SQRT2)
        assert coherent_detect_indices(z, channel, c) == (i1, i2)
        np.testing.assert_allclose(coherent_detect(z, channel, c).matrix, info.matrix, atol=1e-12)


def test_detect_tie_breaks_to_first_index():
    c = psk_constellation(8)
    zero = AlamoutiMatrix(0.0, 0.0)
    assert ml_differential_detect_indices(zero, zero, c) == (0, 0)
    assert coherent_detect_indices(zero, zero, c) == (0, 0)


def test_detection_invariant_to_positive_scaling(rng):
    c = psk_constellation(8)
    for _ in range(50):
        z_k = random_alamouti(rng)
        z_next = random_alamouti(rng)
        base = ml_differential_detect_indices(z_k, z_next, c)
        assert ml_differential_detect_indices(z_k.scaled(7.5), z_next.scaled(7.5), c) == base
