"""Binaural rendering of ambisonic signals with SH-domain head-related IRs.

Each ear signal is the sum over ACN channels of the ambisonic signal
convolved with the matching SH coefficient of that ear's HRIR set.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import sphmath
from .encoder import AmbisonicBlock, acn_inverse, n_channels, order_from_channels
from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HrtfShSet:
    """Per-ear SH-domain HRIRs, arrays of shape ((N_h+1)**2, taps), ACN/N3D."""

    left: np.ndarray
    right: np.ndarray
    sample_rate: float

    def __post_init__(self):
        left = np.atleast_2d(np.asarray(self.left, dtype=float))
        right = np.atleast_2d(np.asarray(self.right, dtype=float))
        if left.shape != right.shape:
            raise ConfigError(f"left/right HRIR sets differ in shape: {left.shape} vs {right.shape}")
        if left.shape[1] == 0:
            raise ConfigError("HRIRs must have at least one tap")
        order_from_channels(left.shape[0])
        if not self.sample_rate > 0:
            raise ConfigError("sample_rate must be positive")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def order(self) -> int:
        return order_from_channels(self.left.shape[0])

    @property
    def n_taps(self) -> int:
        return self.left.shape[1]


@dataclass(frozen=True)
class BinauralOutput:
    left: np.ndarray
    right: np.ndarray
    sample_rate: float

    def stereo(self) -> np.ndarray:
        """(2, samples) array, left first."""
        return np.stack([self.left, self.right])


def truncate_order(hrtf: HrtfShSet, order: int) -> HrtfShSet:
    """Keep ACN channels 0 .. (order+1)**2 - 1."""
    if order > hrtf.order or order < 0:
        raise ConfigError(f"cannot truncate an order-{hrtf.order} HRTF set to order {order}")
    keep = n_channels(order)
    return HrtfShSet(hrtf.left[:keep], hrtf.right[:keep], hrtf.sample_rate)


def constant_hrtf(order: int = 0, n_taps: int = 1, sample_rate: float = 48000.0) -> HrtfShSet:
    """Direction-independent unit HRTF for both ears.

    H == 1 on the sphere has the single coefficient sqrt(4 pi) at ACN 0.
    """
    left = np.zeros((n_channels(order), n_taps))
    left[0, 0] = math.sqrt(4.0 * math.pi)
    return HrtfShSet(left, left.copy(), sample_rate)


def mirror_left_right(left: np.ndarray) -> np.ndarray:
    """Right-ear coefficients of a laterally symmetric head given the left ear.

    Mirroring y -> -y maps azimuth a -> -a, which flips the sign of the
    sin-type (m < 0) harmonics only.
    """
    left = np.asarray(left, dtype=float)
    sign = np.array([-1.0 if acn_inverse(j)[1] < 0 else 1.0 for j in range(left.shape[0])])
    return left * sign[:, np.newaxis]


def render(ambi: AmbisonicBlock, hrtf: HrtfShSet) -> BinauralOutput:
    """Left and right ear signals, length = signal length + HRIR length - 1.

    The rendering order is min(ambisonic order, HRTF order); ambisonic channels
    above it are dropped with a logged warning.
    """
    if not math.isclose(ambi.sample_rate, hrtf.sample_rate, rel_tol=1e-12):
        raise ConfigError(f"sample rate mismatch: ambisonics {ambi.sample_rate}, HRTF {hrtf.sample_rate}")
    n_sig = ambi.signals.shape[1]
    if n_sig == 0:
        raise ConfigError("cannot render an empty ambisonic block")
    order = min(ambi.order, hrtf.order)
    sphmath.check_degree(order, sphmath.MAX_AMBI_ORDER)
    if ambi.order > order:
        logger.warning("rendering order %d: dropping ambisonic channels above ACN %d", order, n_channels(order) - 1)
    hr = truncate_order(hrtf, order)
    n_ch = n_channels(order)
    n_out = n_sig + hr.n_taps - 1
    nfft = 1 << (n_out - 1).bit_length()
    S = np.fft.rfft(ambi.signals[:n_ch], n=nfft, axis=-1)
    ears = []
    for h in (hr.left, hr.right):
        Hf = np.fft.rfft(h, n=nfft, axis=-1)
        acc = np.zeros(S.shape[1], dtype=complex)
        for j in range(n_ch):
            acc += S[j] * Hf[j]
        ears.append(np.fft.irfft(acc, n=nfft)[:n_out])
    return BinauralOutput(ears[0], ears[1], ambi.sample_rate)
