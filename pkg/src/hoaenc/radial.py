"""Rigid-sphere radial terms, their regularised inverse and FIR realisation.

The radial term b_n(x), x = omega R / c, maps ambisonic coefficients of an
incident field to the surface pressure on a rigid sphere. Two algebraically
equivalent evaluations are provided; the Wronskian-reduced one is canonical.
The inverse 1/b_n is unbounded at low x for n > 0, so it is Tikhonov
regularised with a single parameter: the maximum gain in dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import get_window

from . import sphmath
from .errors import ConfigError, DomainError

#: Exact powers of the imaginary unit, indexed by n % 4.
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def i_pow(n: int) -> complex:
    return _I_POW[n % 4]


def _positive_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise DomainError("radial term needs x > 0 (x = 0 is singular)")
    return x


def radial_term_bessel(n: int, x):
    """b_n(x) = 4 pi i^n [j_n - j_n'/h_n^(2)' h_n^(2)], evaluated literally."""
    n = sphmath.check_degree(n)
    x = _positive_x(x)
    with np.errstate(all="ignore"):
        jn = sphmath.sph_bessel_j(n, x)
        jp = sphmath.sph_bessel_j_prime(n, x)
        h = sphmath.sph_hankel2(n, x)
        hp = sphmath.sph_hankel2_prime(n, x)
        out = 4.0 * math.pi * i_pow(n) * (jn - jp / hp * h)
    return out if np.ndim(out) else complex(out)


def radial_term_wronskian(n: int, x):
    """b_n(x) = -4 pi i^n (i / x^2) / h_n^(2)'(x).

    Where h_n^(2)' overflows (very high n, tiny x) the true limit 0 is returned.
    """
    n = sphmath.check_degree(n)
    x = _positive_x(x)
    with np.errstate(all="ignore"):
        hp = np.asarray(sphmath.sph_hankel2_prime(n, x))
        out = -4.0 * math.pi * i_pow(n) * 1j / (x * x * hp)
        out = np.where(np.isfinite(out), out, 0.0)
    return out if np.ndim(out) else complex(out)


def radial_term(n: int, x):
    """b_n at x >= 0, using the analytic limits at x = 0 (4 pi for n = 0, else 0)."""
    n = sphmath.check_degree(n)
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0):
        raise DomainError("x must be finite and non-negative")
    zero = x == 0.0
    out = np.asarray(radial_term_wronskian(n, np.where(zero, 1.0, x)), dtype=complex)
    out = np.where(zero, 4.0 * math.pi if n == 0 else 0.0, out)
    return out if out.ndim else complex(out)


def max_gain_linear(max_gain_db: float) -> float:
    return 10.0 ** (max_gain_db / 20.0)


def inverse_radial_regularized(n: int, x, max_gain_db: float):
    """Tikhonov-regularised 1/b_n: conj(b) / (|b|^2 + lam^2), lam = 1/(2 g_max).

    The magnitude never exceeds g_max = 10**(max_gain_db/20); it is reached
    where |b_n| = lam. At x = 0 the analytic limit of b_n is used.
    """
    if not math.isfinite(max_gain_db):
        raise DomainError("max_gain_db must be finite")
    lam = 1.0 / (2.0 * max_gain_linear(max_gain_db))
    b = np.asarray(radial_term(n, x))
    out = np.conj(b) / (b.real**2 + b.imag**2 + lam * lam)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class RadialConfig:
    """Parameters of a radial filter bank.

    Attributes
    ----------
    radius : float
        Sphere radius in metres.
    speed_of_sound : float
        In m/s.
    order : int
        Highest radial order designed.
    sample_rate : float
        In Hz.
    max_gain_db : float
        Regularisation ceiling for every inverse filter.
    fir_length : int
        Even number of taps, at least 32.
    """

    radius: float
    speed_of_sound: float = 343.0
    order: int = 4
    sample_rate: float = 48000.0
    max_gain_db: float = 20.0
    fir_length: int = 1024

    def __post_init__(self):
        for name in ("radius", "speed_of_sound", "sample_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.max_gain_db):
            raise ConfigError("max_gain_db must be finite")
        if int(self.fir_length) != self.fir_length or self.fir_length < 32 or self.fir_length % 2:
            raise ConfigError(f"fir_length must be an even integer >= 32, got {self.fir_length!r}")
        try:
            sphmath.check_degree(self.order, sphmath.MAX_AMBI_ORDER)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def dimensionless_frequency(self, freqs):
        """x = 2 pi f R / c."""
        return 2.0 * np.pi * np.asarray(freqs, dtype=float) * self.radius / self.speed_of_sound

    @property
    def fft_frequencies(self) -> np.ndarray:
        return np.fft.rfftfreq(self.fir_length, d=1.0 / self.sample_rate)


@dataclass(frozen=True)
class RadialFilterBank:
    """Designed inverse radial filters, one per order.

    ``freq_response`` and ``target_response`` hold the non-negative half of the
    ``fir_length``-point DFT grid (the rest follows by conjugate symmetry).
    ``freq_response`` is the DFT of the final windowed taps; ``target_response``
    is the regularised inverse with the linear-phase delay applied, before
    windowing.
    """

    config: RadialConfig
    impulse_response: np.ndarray = field(repr=False)
    freq_response: np.ndarray = field(repr=False)
    target_response: np.ndarray = field(repr=False)
    group_delay_samples: int = 0

    @property
    def order(self) -> int:
        return self.config.order

    @property
    def frequencies(self) -> np.ndarray:
        return self.config.fft_frequencies

    def full_freq_response(self) -> np.ndarray:
        """Responses on the complete ``fir_length``-point grid."""
        return np.fft.fft(self.impulse_response, axis=-1)


def design_fir_bank(config: RadialConfig) -> RadialFilterBank:
    """Frequency-sampling design of the inverse radial filters.

    For each order the regularised inverse is sampled on the DFT grid, delayed
    by ``fir_length/2`` samples, taken to the time domain and Hann windowed.
    """
    length = int(config.fir_length)
    delay = length // 2
    k = np.arange(length // 2 + 1)
    x = config.dimensionless_frequency(config.fft_frequencies)
    # e^{-i 2 pi k delay / length} with delay = length/2
    shift = np.where(k % 2 == 0, 1.0, -1.0)
    window = get_window("hann", length, fftbins=True)

    taps = np.empty((config.order + 1, length))
    target = np.empty((config.order + 1, k.size), dtype=complex)
    for n in range(config.order + 1):
        h = inverse_radial_regularized(n, x, config.max_gain_db) * shift
        # Nyquist bin must be real for a real impulse response
        h[-1] = h[-1].real
        target[n] = h
        taps[n] = np.fft.irfft(h, n=length) * window
    taps.setflags(write=False)
    freq = np.fft.rfft(taps, axis=-1)
    freq.setflags(write=False)
    target.setflags(write=False)
    return RadialFilterBank(config, taps, freq, target, delay)


def regularization_edge(n: int, config: RadialConfig, max_loss_db: float = 0.5) -> float:
    """Lowest frequency above which regularisation costs less than ``max_loss_db``.

    Scanned on a 1 Hz grid up to Nyquist; 0.0 for n = 0 at usual gains.
    """
    lam = 1.0 / (2.0 * max_gain_linear(config.max_gain_db))
    freqs = np.arange(1.0, config.sample_rate / 2.0, 1.0)
    b = np.abs(radial_term(n, config.dimensionless_frequency(freqs)))
    loss_db = -10.0 * np.log10(b * b / (b * b + lam * lam))
    bad = np.nonzero(loss_db > max_loss_db)[0]
    if bad.size == 0:
        return 0.0
    if bad[-1] + 1 >= freqs.size:
        return math.inf
    return float(freqs[bad[-1] + 1])
