import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoaenc import sphmath
from hoaenc.errors import DomainError

from . import oracles

# Frozen extended-precision values (see tests/oracles.py for how they were produced).
P32_AT_03 = 4.095
P54_AT_M07 = -172.05615
Y3M2_AT_11_24 = -0.518701724044545406881837650708
Y53_AT_04_59 = 0.0783847864653449821126945170786
J5_AT_2 = 0.002635169770244117349046729586109252956197
H4_AT_3 = complex(0.05614971432884413142863236192564035934665, 0.9183487947250682310164936550309102379314)
H2P_AT_25 = complex(0.1041329138887202461529431948931981735504, -0.4334795222903203925489291705601918015698)
J0P_AT_HALF_PI = -0.4052847345693510857755178528389105556174


class TestAssocLegendre:
    def test_trivial_values(self):
        assert sphmath.assoc_legendre(0, 0, 0.3) == 1.0
        assert sphmath.assoc_legendre(1, 0, 0.5) == 0.5
        assert sphmath.assoc_legendre(1, 1, 0.0) == -1.0

    def test_frozen_rodrigues_values(self):
        assert sphmath.assoc_legendre(3, 2, 0.3) == pytest.approx(P32_AT_03, rel=1e-13)
        assert sphmath.assoc_legendre(5, 4, -0.7) == pytest.approx(P54_AT_M07, rel=1e-13)

    @pytest.mark.parametrize("n,m,mu", [(2, 1, 0.37), (4, 3, -0.81), (6, 0, 0.12), (7, 5, 0.66), (8, 8, -0.2)])
    def test_against_rodrigues(self, n, m, mu):
        assert sphmath.assoc_legendre(n, m, mu) == pytest.approx(oracles.legendre_rodrigues(n, m, mu), rel=1e-12)

    def test_vectorised(self):
        mu = np.linspace(-1, 1, 7)
        out = sphmath.assoc_legendre(2, 0, mu)
        np.testing.assert_allclose(out, 0.5 * (3 * mu**2 - 1), atol=1e-15)

    @pytest.mark.parametrize("n,m,mu", [(2, 3, 0.1), (2, -1, 0.1), (2, 1, 1.0001), (2, 1, np.nan)])
    def test_domain_errors(self, n, m, mu):
        with pytest.raises(DomainError):
            sphmath.assoc_legendre(n, m, mu)

    def test_degree_cap(self):
        with pytest.raises(DomainError):
            sphmath.assoc_legendre(sphmath.N_MAX + 1, 0, 0.1)


class TestRealSH:
    def test_monopole(self):
        assert sphmath.real_sh(0, 0, 0.7, 1.9) == pytest.approx(1 / math.sqrt(4 * math.pi), rel=1e-15)
        assert sphmath.real_sh(0, 0, 0.7, 1.9) == pytest.approx(0.28209479, abs=1e-8)

    def test_dipole_at_pole(self):
        assert sphmath.real_sh(1, 0, 0.0, 4.0) == pytest.approx(0.48860251, abs=1e-8)

    def test_frozen_values(self):
        assert sphmath.real_sh(3, -2, 1.1, 2.4) == pytest.approx(Y3M2_AT_11_24, abs=1e-12)
        assert sphmath.real_sh(5, 3, 0.4, 5.9) == pytest.approx(Y53_AT_04_59, abs=1e-12)

    @pytest.mark.parametrize("n,m", [(1, -1), (1, 1), (2, -2), (3, 3), (4, -1), (6, 5), (9, -7)])
    def test_against_definition(self, n, m):
        beta, alpha = 2.05, 0.77
        assert sphmath.real_sh(n, m, beta, alpha) == pytest.approx(
            oracles.real_sh_rodrigues(n, m, beta, alpha), abs=1e-12
        )

    def test_first_order_cartesian(self):
        # N3D first order: sqrt(3) * (y, z, x) / sqrt(4 pi) in ACN 1, 2, 3
        beta, alpha = 0.9, 2.2
        Y = sphmath.real_sh_matrix(1, beta, alpha)
        xyz = np.array([np.sin(beta) * np.cos(alpha), np.sin(beta) * np.sin(alpha), np.cos(beta)])
        s = math.sqrt(3 / (4 * math.pi))
        np.testing.assert_allclose(Y[1:], s * xyz[[1, 2, 0]], atol=1e-15)

    def test_high_order_matches_definition(self):
        assert sphmath.real_sh(16, -11, 0.3, 1.3) == pytest.approx(
            oracles.real_sh_rodrigues(16, -11, 0.3, 1.3), abs=1e-12
        )

    def test_matrix_acn_layout(self):
        Y = sphmath.real_sh_matrix(3, 1.0, 0.5)
        for n in range(4):
            for m in range(-n, n + 1):
                assert Y[n * n + n + m] == sphmath.real_sh(n, m, 1.0, 0.5)

    @pytest.mark.parametrize("order", [0, 2, 5, 8])
    def test_orthonormal_on_gauss_legendre(self, order):
        beta, alpha, w = sphmath.gauss_legendre_sphere(2 * order)
        Y = sphmath.real_sh_matrix(order, beta, alpha)
        gram = Y.T @ (w[:, None] * Y)
        np.testing.assert_allclose(gram, np.eye(Y.shape[1]), atol=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(0, 16),
        data=st.data(),
        beta=st.floats(0, math.pi),
        alpha=st.floats(-10, 10),
    )
    def test_bounded(self, n, data, beta, alpha):
        m = data.draw(st.integers(-n, n))
        bound = math.sqrt((2 * n + 1) / (4 * math.pi)) * math.sqrt(2)
        assert abs(sphmath.real_sh(n, m, beta, alpha)) <= bound * (1 + 1e-12)

    def test_rejects_bad_colatitude(self):
        with pytest.raises(DomainError):
            sphmath.real_sh(1, 0, -0.1, 0.0)
        with pytest.raises(DomainError):
            sphmath.real_sh(2, 3, 0.1, 0.0)


def test_gauss_legendre_grid_size_and_weights():
    beta, alpha, w = sphmath.gauss_legendre_sphere(9)
    assert beta.size == alpha.size == w.size == 50
    assert w.sum() == pytest.approx(4 * math.pi, rel=1e-14)


class TestBessel:
    def test_j0_limits(self):
        assert sphmath.sph_bessel_j(0, 0.0) == 1.0
        assert sphmath.sph_bessel_j(0, 1e-9) == pytest.approx(1.0, abs=1e-15)
        assert sphmath.sph_bessel_j(3, 0.0) == 0.0
        assert abs(sphmath.sph_bessel_j(0, math.pi)) < 1e-14

    def test_j5_frozen(self):
        assert sphmath.sph_bessel_j(5, 2.0) == pytest.approx(J5_AT_2, rel=1e-12)

    @pytest.mark.parametrize("n", [0, 1, 4, 10, 16, 30])
    @pytest.mark.parametrize("x", [1e-6, 5e-5, 2e-4, 0.3, 2.5, 11.0, 35.0])
    def test_j_against_series(self, n, x):
        ref = float(oracles.sph_jn(n, x, terms=120))
        assert sphmath.sph_bessel_j(n, x) == pytest.approx(ref, rel=1e-11, abs=1e-300)

    @pytest.mark.parametrize("n", [0, 2, 7, 12])
    @pytest.mark.parametrize("x", [0.05, 1.0, 6.3, 30.0])
    def test_y_against_recurrence(self, n, x):
        assert sphmath.sph_bessel_y(n, x) == pytest.approx(float(oracles.sph_yn(n, x)), rel=1e-11)

    def test_hankel2_order_zero(self):
        np.testing.assert_allclose(sphmath.sph_hankel2(0, 1.0), complex(math.sin(1), math.cos(1)), rtol=1e-15)
        h = sphmath.sph_hankel2(0, math.pi / 2)
        assert h.real == pytest.approx(2 / math.pi, rel=1e-15)
        assert abs(h.imag) < 1e-16
        # i e^{-ix} / x
        x = 2.7
        assert sphmath.sph_hankel2(0, x) == pytest.approx(1j * np.exp(-1j * x) / x, rel=1e-14)

    def test_hankel2_frozen(self):
        assert sphmath.sph_hankel2(4, 3.0) == pytest.approx(H4_AT_3, rel=1e-12)

    def test_hankel_singular_at_zero(self):
        with pytest.raises(DomainError):
            sphmath.sph_hankel2(1, 0.0)
        with pytest.raises(DomainError):
            sphmath.sph_hankel2_prime(0, 0.0)
        with pytest.raises(DomainError):
            sphmath.sph_bessel_j(0, -1.0)

    def test_derivative_values(self):
        assert sphmath.sph_bessel_j_prime(0, math.pi / 2) == pytest.approx(J0P_AT_HALF_PI, rel=1e-13)
        assert sphmath.sph_bessel_j_prime(1, 0.0) == pytest.approx(1 / 3, rel=1e-15)
        assert sphmath.sph_bessel_j_prime(2, 0.0) == 0.0
        assert sphmath.sph_hankel2_prime(2, 2.5) == pytest.approx(H2P_AT_25, rel=1e-12)

    def test_j0_prime_finite_difference(self):
        x, h = math.pi / 2, 1e-6
        fd = (sphmath.sph_bessel_j(0, x + h) - sphmath.sph_bessel_j(0, x - h)) / (2 * h)
        assert sphmath.sph_bessel_j_prime(0, x) == pytest.approx(fd, abs=1e-8)
        # closed form: -j_1(pi/2) = -4 / pi^2
        assert sphmath.sph_bessel_j_prime(0, x) == pytest.approx(-4 / math.pi**2, rel=1e-14)

    def test_h2_prime_finite_difference(self):
        x, h = 2.5, 1e-6
        fd = (sphmath.sph_hankel2(2, x + h) - sphmath.sph_hankel2(2, x - h)) / (2 * h)
        assert abs(sphmath.sph_hankel2_prime(2, x) - fd) < 1e-8

    def test_derivatives_vs_central_differences(self):
        x = np.linspace(0.1, 30, 400)
        h = 1e-5
        for n in range(11):
            fd_j = (sphmath.sph_bessel_j(n, x + h) - sphmath.sph_bessel_j(n, x - h)) / (2 * h)
            np.testing.assert_allclose(sphmath.sph_bessel_j_prime(n, x), fd_j, atol=1e-7, rtol=0)
            # y_n reaches 1e19 near x = 0.1; the difference quotient is only good relatively
            fd_y = (sphmath.sph_bessel_y(n, x + h) - sphmath.sph_bessel_y(n, x - h)) / (2 * h)
            np.testing.assert_allclose(sphmath.sph_bessel_y_prime(n, x), fd_y, rtol=1e-6)

    def test_small_argument_series_is_continuous(self):
        for n in (0, 1, 3, 8):
            lo = sphmath.sph_bessel_j(n, np.nextafter(sphmath.SMALL_X, 0))
            hi = sphmath.sph_bessel_j(n, sphmath.SMALL_X)
            assert lo == pytest.approx(hi, rel=1e-10, abs=1e-300)
            lo = sphmath.sph_bessel_j_prime(n, np.nextafter(sphmath.SMALL_X, 0))
            hi = sphmath.sph_bessel_j_prime(n, sphmath.SMALL_X)
            assert lo == pytest.approx(hi, rel=1e-7, abs=1e-300)

    def test_wronskian(self):
        x = np.logspace(-2, np.log10(50), 300)
        for n in range(11):
            w = sphmath.sph_bessel_j_prime(n, x) * sphmath.sph_bessel_y(n, x) - sphmath.sph_bessel_j(
                n, x
            ) * sphmath.sph_bessel_y_prime(n, x)
            np.testing.assert_allclose(w, -1 / x**2, rtol=1e-9)
