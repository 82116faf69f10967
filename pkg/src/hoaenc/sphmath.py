"""Special functions on the sphere.

Associated Legendre functions (with Condon-Shortley phase), real N3D spherical
harmonics, and spherical Bessel / Hankel functions of the second kind together
with their derivatives. Everything here is a pure function of its arguments.

All functions accept numpy arrays for the continuous argument and broadcast.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError

#: Largest degree accepted by the public functions in this module.
N_MAX = 48

#: Largest ambisonic order for encoding, filter design and rendering.
MAX_AMBI_ORDER = 16

#: Below this argument, j_n and j_n' come from their leading-order series.
SMALL_X = 1e-4


def check_degree(n: int, n_max: int = N_MAX) -> int:
    """Validate a degree / radial order and return it as a Python int."""
    if isinstance(n, (bool, np.bool_)) or int(n) != n:
        raise DomainError(f"degree must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    if n > n_max:
        raise DomainError(f"degree {n} exceeds the supported maximum {n_max}")
    return n


def check_mode(n: int, m: int, n_max: int = N_MAX) -> tuple[int, int]:
    n = check_degree(n, n_max)
    if int(m) != m or abs(int(m)) > n:
        raise DomainError(f"order m={m!r} is not valid for degree n={n}")
    return n, int(m)


def _double_factorial_odd(n: int) -> float:
    """(2n+1)!! as a float."""
    out = 1.0
    for k in range(3, 2 * n + 2, 2):
        out *= k
    return out


# ---------------------------------------------------------------------------
# Legendre functions and real spherical harmonics
# ---------------------------------------------------------------------------


def assoc_legendre(n: int, m: int, mu):
    """Associated Legendre function P_n^m(mu), Condon-Shortley phase included.

    Evaluated by the standard upward recurrence in n, starting from the
    sectoral term P_m^m = (-1)^m (2m-1)!! (1 - mu^2)^(m/2).

    Parameters
    ----------
    n, m : int
        Degree and order with ``0 <= m <= n``.
    mu : float or array_like
        Argument(s) in [-1, 1].

    Raises
    ------
    DomainError
        If ``|mu| > 1`` or ``m`` is outside ``[0, n]``.
    """
    n = check_degree(n)
    if int(m) != m or m < 0 or m > n:
        raise DomainError(f"assoc_legendre needs 0 <= m <= n, got n={n}, m={m}")
    m = int(m)
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(~np.isfinite(mu_arr)) or np.any(np.abs(mu_arr) > 1.0):
        raise DomainError("assoc_legendre argument must lie in [-1, 1]")

    sin_beta = np.sqrt(np.clip(1.0 - mu_arr * mu_arr, 0.0, None))
    p_mm = np.ones_like(mu_arr)
    for k in range(1, m + 1):
        p_mm = -(2 * k - 1) * sin_beta * p_mm
    if n == m:
        return p_mm if p_mm.ndim else float(p_mm)

    p_prev, p_cur = p_mm, (2 * m + 1) * mu_arr * p_mm
    for ell in range(m + 2, n + 1):
        p_prev, p_cur = p_cur, ((2 * ell - 1) * mu_arr * p_cur - (ell + m - 1) * p_prev) / (ell - m)
    return p_cur if p_cur.ndim else float(p_cur)


def _normalized_legendre_table(order: int, cos_beta, sin_beta):
    """Fully normalised P_n^m for 0 <= m <= n <= order (Condon-Shortley kept).

    Returns a dict ``(n, m) -> array`` holding
    sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m(cos beta).
    """
    table = {(0, 0): np.full_like(cos_beta, 1.0 / math.sqrt(4.0 * math.pi))}
    for m in range(1, order + 1):
        table[(m, m)] = -math.sqrt((2 * m + 1) / (2 * m)) * sin_beta * table[(m - 1, m - 1)]
    for m in range(order):
        table[(m + 1, m)] = math.sqrt(2 * m + 3) * cos_beta * table[(m, m)]
        for n in range(m + 2, order + 1):
            a = math.sqrt((4 * n * n - 1) / (n * n - m * m))
            b = math.sqrt(((n - 1) ** 2 - m * m) / (4 * (n - 1) ** 2 - 1))
            table[(n, m)] = a * (cos_beta * table[(n - 1, m)] - b * table[(n - 2, m)])
    return table


def _angles(colatitude, azimuth):
    beta = np.asarray(colatitude, dtype=float)
    alpha = np.asarray(azimuth, dtype=float)
    if np.any(~np.isfinite(beta)) or np.any(~np.isfinite(alpha)):
        raise DomainError("angles must be finite")
    if np.any(beta < 0.0) or np.any(beta > math.pi):
        raise DomainError("colatitude must lie in [0, pi]")
    beta, alpha = np.broadcast_arrays(beta, alpha)
    return beta, alpha


def real_sh_matrix(order: int, colatitude, azimuth) -> np.ndarray:
    """Real N3D spherical harmonics for all modes up to ``order``.

    Returns an array of shape ``(..., (order+1)**2)`` whose last axis is in
    ACN order (channel ``n*n + n + m``).
    """
    order = check_degree(order)
    beta, alpha = _angles(colatitude, azimuth)
    cos_beta, sin_beta = np.cos(beta), np.sin(beta)
    table = _normalized_legendre_table(order, cos_beta, sin_beta)
    out = np.empty(beta.shape + ((order + 1) ** 2,))
    sqrt2 = math.sqrt(2.0)
    for n in range(order + 1):
        for m in range(-n, n + 1):
            am = abs(m)
            # (-1)^m cancels the Condon-Shortley phase carried by the table
            base = (-1.0) ** m * table[(n, am)]
            if m < 0:
                val = sqrt2 * base * np.sin(am * alpha)
            elif m == 0:
                val = base
            else:
                val = sqrt2 * base * np.cos(am * alpha)
            out[..., n * n + n + m] = val
    return out


def real_sh(n: int, m: int, colatitude, azimuth):
    """Real N3D spherical harmonic Y_{n,m}(colatitude, azimuth).

    sin(|m| azimuth) for m < 0, cos(m azimuth) for m > 0, each with a sqrt(2)
    factor; orthonormal over the unit sphere.
    """
    n, m = check_mode(n, m)
    val = real_sh_matrix(n, colatitude, azimuth)[..., n * n + n + m]
    return val if np.ndim(val) else float(val)


def gauss_legendre_sphere(degree: int):
    """Gauss-Legendre product grid integrating polynomials up to ``degree``.

    Uses ``ceil((degree+1)/2)`` Gauss-Legendre colatitudes and
    ``degree+1`` equispaced azimuths (``2(N+1)**2`` nodes for degree ``2N+1``).

    Returns
    -------
    colatitude, azimuth, weights : ndarray
        Flattened node angles in radians and weights summing to 4*pi.
    """
    if degree < 0:
        raise DomainError("quadrature degree must be non-negative")
    n_theta = degree // 2 + 1
    n_phi = degree + 1
    mu, w_mu = np.polynomial.legendre.leggauss(n_theta)
    beta = np.arccos(mu)
    alpha = 2.0 * np.pi * np.arange(n_phi) / n_phi
    bb, aa = np.meshgrid(beta, alpha, indexing="ij")
    weights = np.repeat(w_mu, n_phi) * (2.0 * np.pi / n_phi)
    return bb.ravel(), aa.ravel(), weights


# ---------------------------------------------------------------------------
# Spherical Bessel and Hankel functions
# ---------------------------------------------------------------------------


def _nonneg(x, *, positive=False, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0):
        raise DomainError(f"{name} must be finite and non-negative")
    if positive and np.any(x == 0.0):
        raise DomainError(f"{name} must be strictly positive (singular at 0)")
    return x


def _ret(a):
    return a if np.ndim(a) else a[()]


def sph_bessel_j(n: int, x):
    """Spherical Bessel function of the first kind j_n(x), x >= 0."""
    n = check_degree(n)
    x = _nonneg(x)
    small = x < SMALL_X
    out = special.spherical_jn(n, np.where(small, 1.0, x))
    if np.any(small):
        xs = x[small] if x.ndim else x
        lead = xs**n / _double_factorial_odd(n)
        series = lead * (1.0 - xs * xs / (2.0 * (2 * n + 3)))
        if x.ndim:
            out[small] = series
        else:
            out = series
    return _ret(np.asarray(out, dtype=float))


def sph_bessel_y(n: int, x):
    """Spherical Bessel function of the second kind y_n(x), x > 0."""
    n = check_degree(n)
    x = _nonneg(x, positive=True)
    return _ret(np.asarray(special.spherical_yn(n, x), dtype=float))


def sph_bessel_j_prime(n: int, x):
    """Derivative j_n'(x) via j_n' = j_{n-1} - (n+1)/x j_n (j_0' = -j_1)."""
    n = check_degree(n)
    x = _nonneg(x)
    if n == 0:
        return _ret(-np.asarray(sph_bessel_j(1, x)))
    small = x < SMALL_X
    xs = np.where(small, 1.0, x)
    out = np.asarray(sph_bessel_j(n - 1, xs) - (n + 1) / xs * sph_bessel_j(n, xs), dtype=float)
    if np.any(small):
        xv = x[small] if x.ndim else x
        series = xv ** (n - 1) / _double_factorial_odd(n) * (n - (n + 2) * xv * xv / (2.0 * (2 * n + 3)))
        if x.ndim:
            out[small] = series
        else:
            out = np.asarray(series)
    return _ret(out)


def sph_bessel_y_prime(n: int, x):
    """Derivative y_n'(x), x > 0, by the same recurrence identity."""
    n = check_degree(n)
    x = _nonneg(x, positive=True)
    if n == 0:
        return _ret(-np.asarray(sph_bessel_y(1, x)))
    return _ret(np.asarray(sph_bessel_y(n - 1, x) - (n + 1) / x * sph_bessel_y(n, x)))


def sph_hankel2(n: int, x):
    """Spherical Hankel function of the second kind h_n^(2)(x) = j_n - i y_n.

    With the e^{-i omega t} analysis kernel used throughout the package this
    is the outgoing-wave solution.
    """
    n = check_degree(n)
    x = _nonneg(x, positive=True)
    return _ret(np.asarray(sph_bessel_j(n, x) - 1j * sph_bessel_y(n, x)))


def sph_hankel2_prime(n: int, x):
    """Derivative of h_n^(2) with respect to its argument, x > 0."""
    n = check_degree(n)
    x = _nonneg(x, positive=True)
    return _ret(np.asarray(sph_bessel_j_prime(n, x) - 1j * sph_bessel_y_prime(n, x)))
