"""Spherical harmonic transform of microphone signals into ACN/N3D ambisonics.

Two equivalent routes are provided. ``encode_frequency_domain`` multiplies
short-time spectra by the regularised inverse radial response;
``encode_time_domain`` convolves with the designed inverse radial FIRs.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import get_window, oaconvolve

from . import sphmath
from .errors import ConditioningError, ConfigError, DomainError
from .radial import RadialFilterBank, inverse_radial_regularized

logger = logging.getLogger(__name__)

#: Relative singular-value cutoff for the least-squares encoder.
PINV_RCOND = 1e-8


def acn_index(n: int, m: int) -> int:
    """Ambisonic channel number n^2 + n + m."""
    n, m = sphmath.check_mode(n, m)
    return n * n + n + m


def acn_inverse(channel: int) -> tuple[int, int]:
    """(n, m) for an ambisonic channel number."""
    if int(channel) != channel or channel < 0:
        raise DomainError(f"channel must be a non-negative integer, got {channel!r}")
    channel = int(channel)
    n = math.isqrt(channel)
    return n, channel - n * n - n


def n_channels(order: int) -> int:
    return (order + 1) ** 2


def order_from_channels(count: int) -> int:
    """Ambisonic order for a channel count, which must be a perfect square."""
    n = math.isqrt(count) - 1
    if count < 1 or (n + 1) ** 2 != count:
        raise ConfigError(f"{count} channels do not form a complete ambisonic order")
    return n


def aliasing_frequency(order: int, radius: float, speed_of_sound: float = 343.0) -> float:
    """Frequency at which kR equals the order: N c / (2 pi R)."""
    return order * speed_of_sound / (2.0 * math.pi * radius)


def normalize_azimuth(azimuth):
    return np.mod(np.asarray(azimuth, dtype=float), 2.0 * np.pi)


@dataclass(frozen=True)
class ArrayGeometry:
    """Rigid-sphere microphone array.

    ``colatitude`` and ``azimuth`` are in radians; azimuths are normalised into
    [0, 2 pi). Optional ``weights`` are quadrature weights summing to 4 pi.
    """

    radius: float
    colatitude: np.ndarray
    azimuth: np.ndarray
    speed_of_sound: float = 343.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ConfigError(f"radius must be positive, got {self.radius!r}")
        if not (math.isfinite(self.speed_of_sound) and self.speed_of_sound > 0):
            raise ConfigError(f"speed_of_sound must be positive, got {self.speed_of_sound!r}")
        beta = np.atleast_1d(np.asarray(self.colatitude, dtype=float)).copy()
        alpha = np.atleast_1d(np.asarray(self.azimuth, dtype=float))
        if beta.ndim != 1 or beta.shape != alpha.shape:
            raise ConfigError("colatitude and azimuth must be 1-D and of equal length")
        if beta.size < 1:
            raise ConfigError("geometry needs at least one microphone")
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(alpha))):
            raise ConfigError("microphone angles must be finite")
        if np.any(beta < 0) or np.any(beta > np.pi):
            raise ConfigError("colatitude must lie in [0, pi]")
        alpha = normalize_azimuth(alpha)
        beta.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "colatitude", beta)
        object.__setattr__(self, "azimuth", alpha)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).copy()
            if w.shape != beta.shape:
                raise ConfigError("one quadrature weight per microphone is required")
            if np.any(~np.isfinite(w)) or np.any(w <= 0):
                raise ConfigError("quadrature weights must be positive")
            if abs(w.sum() - 4.0 * math.pi) > 1e-6:
                raise ConfigError(f"quadrature weights sum to {w.sum()!r}, expected 4*pi within 1e-6")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def n_mics(self) -> int:
        return int(self.colatitude.size)

    @classmethod
    def gauss_legendre(cls, order: int, radius: float, speed_of_sound: float = 343.0, degree: int | None = None):
        """Gauss-Legendre grid with exact weights, exact up to ``degree`` (default 2N+1)."""
        beta, alpha, w = sphmath.gauss_legendre_sphere(2 * order + 1 if degree is None else degree)
        return cls(radius, beta, alpha, speed_of_sound, w)

    def default_order(self) -> int:
        """Largest order whose channel count fits the microphone count and
        whose SH matrix has full column rank on this grid."""
        order = min(math.isqrt(self.n_mics) - 1, sphmath.MAX_AMBI_ORDER)
        while order > 0:
            s = np.linalg.svd(sphmath.real_sh_matrix(order, self.colatitude, self.azimuth), compute_uv=False)
            if s[-1] > PINV_RCOND * s[0]:
                break
            order -= 1
        return order

    def __eq__(self, other):
        if not isinstance(other, ArrayGeometry):
            return NotImplemented
        same_w = (self.weights is None and other.weights is None) or (
            self.weights is not None and other.weights is not None and np.array_equal(self.weights, other.weights)
        )
        return (
            self.radius == other.radius
            and self.speed_of_sound == other.speed_of_sound
            and np.array_equal(self.colatitude, other.colatitude)
            and np.array_equal(self.azimuth, other.azimuth)
            and same_w
        )

    __hash__ = None


@dataclass(frozen=True)
class ShMatrix:
    """Real SH evaluation matrix ``Y`` (mics x channels) and encoder ``E`` (channels x mics)."""

    order: int
    Y: np.ndarray = field(repr=False)
    E: np.ndarray = field(repr=False)
    condition_number: float = 1.0


@dataclass(frozen=True)
class MicBlock:
    """Microphone signals, one row per microphone."""

    signals: np.ndarray
    sample_rate: float

    def __post_init__(self):
        sig = np.asarray(self.signals, dtype=float)
        if sig.ndim != 2:
            raise ConfigError("MicBlock signals must be 2-D (mics, samples)")
        object.__setattr__(self, "signals", sig)

    @property
    def n_mics(self) -> int:
        return self.signals.shape[0]


@dataclass(frozen=True)
class AmbisonicBlock:
    """ACN-ordered, N3D-normalised ambisonic signals, one row per channel."""

    signals: np.ndarray
    order: int
    sample_rate: float
    group_delay_samples: int = 0
    normalization: str = field(default="N3D", init=False)
    ordering: str = field(default="ACN", init=False)

    def __post_init__(self):
        sig = np.asarray(self.signals, dtype=float)
        if sig.ndim != 2 or sig.shape[0] != n_channels(self.order):
            raise ConfigError(
                f"order {self.order} requires {n_channels(self.order)} channels, got shape {sig.shape}"
            )
        object.__setattr__(self, "signals", sig)


def build_sh_matrix(geom: ArrayGeometry, order: int) -> ShMatrix:
    """Evaluate the SH matrix at the microphones and derive the encoder.

    With quadrature weights the encoder is ``Y.T @ diag(w)``; otherwise it is
    the least-squares pseudo-inverse of ``Y``.

    Raises
    ------
    ConfigError
        If there are fewer microphones than channels and no weights.
    ConditioningError
        If ``Y`` is rank deficient at this order.
    """
    order = sphmath.check_degree(order, sphmath.MAX_AMBI_ORDER)
    Y = sphmath.real_sh_matrix(order, geom.colatitude, geom.azimuth)
    n_ch = n_channels(order)
    if geom.weights is None and n_ch > geom.n_mics:
        raise ConfigError(f"order {order} needs {n_ch} microphones without quadrature weights, have {geom.n_mics}")
    U, s, Vt = np.linalg.svd(Y, full_matrices=False)
    cond = float(s[0] / s[-1]) if s.size == n_ch and s[-1] > 0 else math.inf
    if s.size < n_ch or s[-1] <= PINV_RCOND * s[0]:
        raise ConditioningError(f"microphone grid is rank deficient for order {order} (condition number {cond:.3g})")
    if geom.weights is not None:
        E = Y.T * geom.weights[np.newaxis, :]
    else:
        E = (Vt.T / s) @ U.T
    if cond > 1e4:
        warnings.warn(f"SH matrix is poorly conditioned (condition number {cond:.3g})", stacklevel=2)
    Y.setflags(write=False)
    E.setflags(write=False)
    return ShMatrix(order, Y, E, cond)


def _check_inputs(mics: MicBlock, geom: ArrayGeometry, shm: ShMatrix, radial: RadialFilterBank):
    cfg = radial.config
    if mics.n_mics != geom.n_mics or shm.E.shape[1] != geom.n_mics:
        raise ConfigError(f"got {mics.n_mics} microphone signals for a {geom.n_mics}-microphone geometry")
    if not math.isclose(cfg.radius, geom.radius, rel_tol=1e-9) or not math.isclose(
        cfg.speed_of_sound, geom.speed_of_sound, rel_tol=1e-9
    ):
        raise ConfigError("filter bank radius / speed of sound do not match the geometry")
    if not math.isclose(cfg.sample_rate, mics.sample_rate, rel_tol=1e-12):
        raise ConfigError(f"sample rate {mics.sample_rate} does not match filter bank rate {cfg.sample_rate}")
    if shm.order > cfg.order:
        raise ConfigError(f"filter bank order {cfg.order} is below encoding order {shm.order}")


def _orders(order: int) -> np.ndarray:
    return np.array([acn_inverse(j)[0] for j in range(n_channels(order))])


def encode_time_domain(mics: MicBlock, geom: ArrayGeometry, shm: ShMatrix, radial: RadialFilterBank,
                       full: bool = False) -> AmbisonicBlock:
    """Apply ``E`` per sample, then convolve channel (n, m) with the order-n FIR.

    Output length is the input length (``full=False``) or input length +
    ``fir_length`` - 1. Either way the output is delayed by
    ``radial.group_delay_samples``.
    """
    _check_inputs(mics, geom, shm, radial)
    n_in = mics.signals.shape[1]
    taps = radial.impulse_response
    n_out = n_in + taps.shape[1] - 1 if (full and n_in) else n_in
    out = np.zeros((n_channels(shm.order), n_out))
    if n_in:
        raw = shm.E @ mics.signals
        orders = _orders(shm.order)
        for j in range(raw.shape[0]):
            out[j] = oaconvolve(raw[j], taps[orders[j]])[:n_out]
    return AmbisonicBlock(out, shm.order, mics.sample_rate, radial.group_delay_samples)


def encode_frequency_domain(mics: MicBlock, geom: ArrayGeometry, shm: ShMatrix, radial: RadialFilterBank,
                            full: bool = False, batch: int = 64) -> AmbisonicBlock:
    """Short-time spectral encoding.

    Frames of ``fir_length`` samples with 50 % overlap and a periodic Hann
    window (which sums to one) are zero-padded to twice their length. Each
    frame's microphone spectra are mixed by ``E`` and channel (n, m) is
    multiplied by the regularised inverse of b_n, delayed by
    ``group_delay_samples`` so the result lines up with the time-domain path.
    ``E`` is real and the short-time transform is linear, so the mixing is done
    on the samples before framing; this is the same operator at lower cost.
    """
    _check_inputs(mics, geom, shm, radial)
    cfg = radial.config
    length = int(cfg.fir_length)
    hop = length // 2
    nfft = 2 * length
    delay = radial.group_delay_samples
    n_in = mics.signals.shape[1]
    n_out = n_in + length - 1 if (full and n_in) else n_in
    n_ch = n_channels(shm.order)
    if n_in == 0:
        return AmbisonicBlock(np.zeros((n_ch, 0)), shm.order, mics.sample_rate, delay)

    freqs = np.fft.rfftfreq(nfft, d=1.0 / cfg.sample_rate)
    x = cfg.dimensionless_frequency(freqs)
    phase = np.exp(-2j * np.pi * np.arange(freqs.size) * delay / nfft)
    per_order = np.stack([inverse_radial_regularized(n, x, cfg.max_gain_db) * phase for n in range(shm.order + 1)])
    per_order[:, -1] = per_order[:, -1].real
    H = per_order[_orders(shm.order)]

    window = get_window("hann", length, fftbins=True)
    padded = np.zeros((n_ch, hop + n_out + length))
    padded[:, hop:hop + n_in] = shm.E @ mics.signals
    n_frames = (padded.shape[1] - length) // hop + 1
    acc = np.zeros((n_ch, (n_frames - 1) * hop + nfft))
    for start in range(0, n_frames, batch):
        idx = np.arange(start, min(start + batch, n_frames))
        frames = np.stack([padded[:, i * hop:i * hop + length] for i in idx], axis=1) * window
        spec = np.fft.rfft(frames, n=nfft, axis=-1)
        sh_spec = spec * H[:, np.newaxis, :]
        blocks = np.fft.irfft(sh_spec, n=nfft, axis=-1)
        for k, i in enumerate(idx):
            acc[:, i * hop:i * hop + nfft] += blocks[:, k]
    out = acc[:, hop:hop + n_out]
    return AmbisonicBlock(np.ascontiguousarray(out), shm.order, mics.sample_rate, delay)
