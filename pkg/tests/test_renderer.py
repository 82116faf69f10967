import logging
import math

import numpy as np
import pytest

from hoaenc import encoder as enc
from hoaenc import renderer, simulator
from hoaenc.errors import ConfigError

FS = 48000.0


def _random_hrtf(rng, order, taps=32):
    left = rng.standard_normal((enc.n_channels(order), taps))
    return renderer.HrtfShSet(left, rng.standard_normal(left.shape), FS)


class TestRender:
    def test_constant_hrtf_identity(self, rng):
        # a unit plane wave has ACN 0 = source / sqrt(4 pi); a constant HRTF returns the source
        src = rng.standard_normal(2000)
        coeffs = simulator.plane_wave_sh_coeffs(1.2, 0.4, 4)
        ambi = enc.AmbisonicBlock(np.outer(coeffs, src), 4, FS)
        out = renderer.render(ambi, renderer.constant_hrtf(4))
        assert out.left.shape == (2000,)
        np.testing.assert_allclose(out.left, src, atol=1e-12)
        np.testing.assert_allclose(out.right, src, atol=1e-12)

    def test_silence(self, rng):
        ambi = enc.AmbisonicBlock(np.zeros((9, 100)), 2, FS)
        out = renderer.render(ambi, _random_hrtf(rng, 2))
        assert out.left.shape == (131,)
        assert np.abs(out.stereo()).max() == 0

    def test_output_is_sum_of_convolutions(self, rng):
        hrtf = _random_hrtf(rng, 2, taps=17)
        sig = rng.standard_normal((9, 80))
        out = renderer.render(enc.AmbisonicBlock(sig, 2, FS), hrtf)
        ref = sum(np.convolve(sig[j], hrtf.left[j]) for j in range(9))
        np.testing.assert_allclose(out.left, ref, atol=1e-12)

    def test_lateral_symmetry(self, rng):
        left = rng.standard_normal((25, 48))
        hrtf = renderer.HrtfShSet(left, renderer.mirror_left_right(left), FS)
        src = rng.standard_normal(500)
        coeffs = simulator.plane_wave_sh_coeffs(1.0, 0.0, 4)
        out = renderer.render(enc.AmbisonicBlock(np.outer(coeffs, src), 4, FS), hrtf)
        np.testing.assert_allclose(out.left, out.right, atol=1e-9)
        # off the median plane the ears differ
        coeffs = simulator.plane_wave_sh_coeffs(1.0, 0.8, 4)
        out = renderer.render(enc.AmbisonicBlock(np.outer(coeffs, src), 4, FS), hrtf)
        assert np.abs(out.left - out.right).max() > 1e-3

    def test_linearity(self, rng):
        hrtf = _random_hrtf(rng, 3)
        x, y = rng.standard_normal((2, 16, 300))
        r = lambda s: renderer.render(enc.AmbisonicBlock(s, 3, FS), hrtf).stereo()
        np.testing.assert_allclose(r(2 * x - 3 * y), 2 * r(x) - 3 * r(y), atol=1e-11)

    def test_truncation_equals_zeroed_channels(self, rng, caplog):
        hrtf = _random_hrtf(rng, 4)
        sig = rng.standard_normal((25, 200))
        zeroed = hrtf.left.copy(), hrtf.right.copy()
        for h in zeroed:
            h[9:] = 0
        full = renderer.render(enc.AmbisonicBlock(sig, 4, FS), renderer.HrtfShSet(*zeroed, FS))
        with caplog.at_level(logging.WARNING):
            trunc = renderer.render(enc.AmbisonicBlock(sig, 4, FS), renderer.truncate_order(hrtf, 2))
        np.testing.assert_allclose(trunc.stereo(), full.stereo(), atol=1e-12)
        assert "dropping" in caplog.text

    def test_lower_ambisonic_order_than_hrtf(self, rng):
        hrtf = _random_hrtf(rng, 4)
        sig = rng.standard_normal((4, 100))
        a = renderer.render(enc.AmbisonicBlock(sig, 1, FS), hrtf)
        b = renderer.render(enc.AmbisonicBlock(sig, 1, FS), renderer.truncate_order(hrtf, 1))
        np.testing.assert_array_equal(a.stereo(), b.stereo())

    def test_sample_rate_mismatch(self, rng):
        with pytest.raises(ConfigError):
            renderer.render(enc.AmbisonicBlock(np.zeros((4, 10)), 1, 44100.0), _random_hrtf(rng, 1))

    def test_empty(self, rng):
        with pytest.raises(ConfigError):
            renderer.render(enc.AmbisonicBlock(np.zeros((4, 0)), 1, FS), _random_hrtf(rng, 1))


class TestTruncate:
    def test_identity(self, rng):
        hrtf = _random_hrtf(rng, 3)
        t = renderer.truncate_order(hrtf, 3)
        np.testing.assert_array_equal(t.left, hrtf.left)

    def test_order_zero(self, rng):
        t = renderer.truncate_order(_random_hrtf(rng, 3), 0)
        assert t.left.shape[0] == t.right.shape[0] == 1
        assert t.order == 0

    def test_too_high(self, rng):
        with pytest.raises(ConfigError):
            renderer.truncate_order(_random_hrtf(rng, 2), 3)


def test_constant_hrtf_layout():
    h = renderer.constant_hrtf(2, n_taps=4)
    assert h.left.shape == (9, 4)
    assert h.left[0, 0] == math.sqrt(4 * math.pi)
    assert np.count_nonzero(h.left) == 1


def test_hrtf_validation():
    with pytest.raises(ConfigError):
        renderer.HrtfShSet(np.zeros((4, 8)), np.zeros((4, 7)), FS)
    with pytest.raises(ConfigError):
        renderer.HrtfShSet(np.zeros((5, 8)), np.zeros((5, 8)), FS)
