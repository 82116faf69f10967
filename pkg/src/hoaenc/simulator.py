"""Plane-wave sound fields: free field and on the surface of a rigid sphere.

A unit-amplitude plane wave arriving from direction d0 has ambisonic
coefficients Y_{n,m}(d0). With the 4 pi i^n j_n expansion of the interior field
this reproduces exp(+i k r cos(gamma)) where gamma is the angle between the
field point and d0, i.e. points towards d0 are reached first (e^{-i omega t}
analysis kernel: an advance multiplies the spectrum by e^{+i omega tau}).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import sphmath
from .encoder import ArrayGeometry, MicBlock, order_from_channels
from .errors import ConfigError, DomainError
from .radial import i_pow, radial_term

#: Relative size of the last simulated order above which a warning is issued.
TRUNCATION_TOL = 1e-8


class TruncationWarning(UserWarning):
    """The simulation order is too low for the requested frequency range."""


@dataclass(frozen=True)
class PlaneWaveSource:
    """Plane wave arriving from (colatitude, azimuth) carrying ``signal``."""

    colatitude: float
    azimuth: float
    signal: np.ndarray
    sample_rate: float

    def __post_init__(self):
        if not (0.0 <= self.colatitude <= math.pi) or not math.isfinite(self.azimuth):
            raise DomainError("invalid plane-wave incidence direction")
        sig = np.asarray(self.signal, dtype=float)
        if sig.ndim != 1 or not np.all(np.isfinite(sig)):
            raise ConfigError("source signal must be a finite 1-D array")
        if not self.sample_rate > 0:
            raise ConfigError("sample_rate must be positive")
        object.__setattr__(self, "signal", sig)
        object.__setattr__(self, "azimuth", float(np.mod(self.azimuth, 2 * np.pi)))


def plane_wave_sh_coeff(colatitude: float, azimuth: float, n: int, m: int) -> float:
    """Ambisonic coefficient (n, m) of a unit plane wave: Y_nm(colatitude, azimuth)."""
    return sphmath.real_sh(n, m, colatitude, azimuth)


def plane_wave_sh_coeffs(colatitude: float, azimuth: float, order: int) -> np.ndarray:
    """All coefficients up to ``order`` as an ACN-ordered vector."""
    return sphmath.real_sh_matrix(order, colatitude, azimuth)


def default_sim_order(f_max: float, radius: float, speed_of_sound: float = 343.0) -> int:
    """Simulation order for frequencies up to ``f_max``.

    At least ceil(k_max R) + 12, raised until the last order falls below
    ``TRUNCATION_TOL`` relative to the zeroth (capped at ``sphmath.N_MAX``).
    """
    x_max = 2.0 * math.pi * f_max * radius / speed_of_sound
    n = int(math.ceil(x_max)) + 12
    while n < sphmath.N_MAX and _truncation_ratio(n, x_max) > TRUNCATION_TOL:
        n += 1
    return min(n, sphmath.N_MAX)


def interior_pressure(coeffs, colatitude: float, azimuth: float, r: float, freq: float,
                      speed_of_sound: float = 343.0) -> complex:
    """Truncated interior expansion sum 4 pi i^n S_nm j_n(k r) Y_nm at one point.

    ``coeffs`` is an ACN-ordered vector (complex allowed); its length fixes the
    truncation order.
    """
    coeffs = np.asarray(coeffs)
    order = order_from_channels(coeffs.size)
    if r < 0:
        raise DomainError("radius of the field point must be non-negative")
    kr = 2.0 * math.pi * freq * r / speed_of_sound
    Y = sphmath.real_sh_matrix(order, colatitude, azimuth)
    total = 0.0 + 0.0j
    for n in range(order + 1):
        sl = slice(n * n, (n + 1) ** 2)
        total += 4.0 * math.pi * i_pow(n) * sphmath.sph_bessel_j(n, kr) * np.dot(coeffs[sl], Y[sl])
    return complex(total)


def _truncation_ratio(n_sim: int, x_max: float) -> float:
    if x_max <= 0:
        return 0.0
    ref = abs(radial_term(0, x_max)) / (4.0 * math.pi)
    return abs(radial_term(n_sim, x_max)) * (2 * n_sim + 1) / (4.0 * math.pi) / ref


def _check_truncation(n_sim: int, x_max: float):
    ratio = _truncation_ratio(n_sim, x_max)
    if ratio > TRUNCATION_TOL:
        warnings.warn(
            f"simulation order {n_sim} is insufficient at kR = {x_max:.3g} "
            f"(last order at {ratio:.2e} of the zeroth)",
            TruncationWarning,
            stacklevel=3,
        )


def surface_spectra(colatitude: float, azimuth: float, geom: ArrayGeometry, n_sim: int, freqs) -> np.ndarray:
    """Rigid-sphere surface transfer functions, shape (mics, freqs), unit plane wave.

    P_q(f) = sum_n sum_m Y_nm(d0) b_n(2 pi f R / c) Y_nm(d_q).
    """
    n_sim = sphmath.check_degree(n_sim)
    freqs = np.asarray(freqs, dtype=float)
    x = 2.0 * np.pi * freqs * geom.radius / geom.speed_of_sound
    _check_truncation(n_sim, float(x.max(initial=0.0)))
    y_src = plane_wave_sh_coeffs(colatitude, azimuth, n_sim)
    y_mic = sphmath.real_sh_matrix(n_sim, geom.colatitude, geom.azimuth)
    # per-order angular factor sum_m Y_nm(d0) Y_nm(d_q), then one product over orders
    G = np.stack([y_mic[:, n * n:(n + 1) ** 2] @ y_src[n * n:(n + 1) ** 2] for n in range(n_sim + 1)], axis=1)
    B = np.stack([radial_term(n, x) for n in range(n_sim + 1)])
    return G.astype(complex) @ B


def surface_pressure(source: PlaneWaveSource, geom: ArrayGeometry, n_sim: int | None = None,
                     nfft: int | None = None) -> MicBlock:
    """Microphone signals for a plane wave hitting the rigid-sphere array.

    One DFT of length ``nfft`` (default: signal length) over the whole signal;
    the result is therefore a circular convolution of period ``nfft``.
    """
    sig = source.signal
    nfft = sig.size if nfft is None else int(nfft)
    if nfft < sig.size:
        raise ConfigError("nfft must not be shorter than the signal")
    if sig.size == 0:
        return MicBlock(np.zeros((geom.n_mics, 0)), source.sample_rate)
    if n_sim is None:
        n_sim = default_sim_order(source.sample_rate / 2.0, geom.radius, geom.speed_of_sound)
    freqs = np.fft.rfftfreq(nfft, d=1.0 / source.sample_rate)
    spectrum = np.fft.rfft(sig, n=nfft)
    P = surface_spectra(source.colatitude, source.azimuth, geom, n_sim, freqs) * spectrum[np.newaxis, :]
    signals = np.fft.irfft(P, n=nfft, axis=-1)[:, :sig.size]
    return MicBlock(signals, source.sample_rate)
