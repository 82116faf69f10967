"""scikit-learn style wrappers around the encoding pipeline.

Signals follow the scikit-learn layout: ``X`` has shape (n_samples, n_channels).
Each transformer is configured entirely through its constructor, so
``get_params`` / ``set_params`` / ``clone`` and ``Pipeline`` work as usual::

    pipe = make_pipeline(
        RigidSpherePlaneWave(geom, colatitude=1.2, azimuth=0.3),
        AmbisonicEncoder(geom, order=4),
        BinauralRenderer(hrtf),
    )
    ears = pipe.fit_transform(source[:, None])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import encoder as _enc
from . import renderer as _ren
from . import simulator as _sim
from .errors import ConfigError
from .radial import RadialConfig, design_fir_bank


def _check_signal(X, n_features=None):
    X = check_array(X, dtype=np.float64, ensure_min_samples=0, ensure_2d=True)
    if n_features is not None and X.shape[1] != n_features:
        raise ConfigError(f"X has {X.shape[1]} channels, expected {n_features}")
    return X


class AmbisonicEncoder(TransformerMixin, BaseEstimator):
    """Encode rigid-sphere microphone signals into ACN/N3D ambisonics.

    Parameters
    ----------
    geometry : ArrayGeometry
        Array description; column q of ``X`` is microphone q.
    order : int, optional
        Ambisonic order. Defaults to the largest order with (N+1)**2 <= M.
    max_gain_db : float
        Regularisation ceiling of the inverse radial filters.
    fir_length : int
        Inverse radial filter length in taps.
    sample_rate : float
        Sample rate of ``X`` in Hz.
    domain : {"time", "freq"}
        FIR convolution or short-time spectral encoding.
    full : bool
        Return the full convolution tail instead of ``n_samples`` rows.

    Attributes
    ----------
    sh_matrix_ : ShMatrix
    filter_bank_ : RadialFilterBank
    order_ : int
    group_delay_samples_ : int
    n_features_in_ : int
    """

    def __init__(self, geometry, order=None, max_gain_db=20.0, fir_length=1024, sample_rate=48000.0,
                 domain="time", full=False):
        self.geometry = geometry
        self.order = order
        self.max_gain_db = max_gain_db
        self.fir_length = fir_length
        self.sample_rate = sample_rate
        self.domain = domain
        self.full = full

    def fit(self, X=None, y=None):
        if self.domain not in ("time", "freq"):
            raise ConfigError(f"domain must be 'time' or 'freq', got {self.domain!r}")
        geom = self.geometry
        if X is not None:
            _check_signal(X, geom.n_mics)
        order = geom.default_order() if self.order is None else int(self.order)
        self.sh_matrix_ = _enc.build_sh_matrix(geom, order)
        self.filter_bank_ = design_fir_bank(
            RadialConfig(geom.radius, geom.speed_of_sound, order, self.sample_rate, self.max_gain_db,
                         self.fir_length)
        )
        self.order_ = order
        self.group_delay_samples_ = self.filter_bank_.group_delay_samples
        self.n_features_in_ = geom.n_mics
        return self

    def transform(self, X):
        """Encode ``X`` of shape (n_samples, n_mics) to (n_samples_out, (N+1)**2)."""
        check_is_fitted(self, "sh_matrix_")
        X = _check_signal(X, self.n_features_in_)
        mics = _enc.MicBlock(X.T, self.sample_rate)
        fn = _enc.encode_time_domain if self.domain == "time" else _enc.encode_frequency_domain
        block = fn(mics, self.geometry, self.sh_matrix_, self.filter_bank_, full=self.full)
        return block.signals.T

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "sh_matrix_")
        return np.array([f"acn{j}" for j in range(_enc.n_channels(self.order_))], dtype=object)


class BinauralRenderer(TransformerMixin, BaseEstimator):
    """Render ACN/N3D ambisonics (n_samples, channels) to two ear signals.

    Output has shape (n_samples + n_taps - 1, 2), left ear first.
    """

    def __init__(self, hrtf):
        self.hrtf = hrtf

    def fit(self, X=None, y=None):
        if X is not None:
            X = _check_signal(X)
            _enc.order_from_channels(X.shape[1])
            self.n_features_in_ = X.shape[1]
        self.order_ = self.hrtf.order
        return self

    def transform(self, X):
        check_is_fitted(self, "order_")
        X = _check_signal(X)
        order = _enc.order_from_channels(X.shape[1])
        ambi = _enc.AmbisonicBlock(X.T, order, self.hrtf.sample_rate)
        return _ren.render(ambi, self.hrtf).stereo().T

    def get_feature_names_out(self, input_features=None):
        return np.array(["left", "right"], dtype=object)


class RigidSpherePlaneWave(TransformerMixin, BaseEstimator):
    """Microphone signals of a plane wave from (colatitude, azimuth) on a rigid sphere.

    ``X`` is the source signal with shape (n_samples, 1); the output has one
    column per microphone of ``geometry``. Angles are in radians.
    """

    def __init__(self, geometry, colatitude=0.0, azimuth=0.0, sample_rate=48000.0, order_sim=None):
        self.geometry = geometry
        self.colatitude = colatitude
        self.azimuth = azimuth
        self.sample_rate = sample_rate
        self.order_sim = order_sim

    def fit(self, X=None, y=None):
        if X is not None:
            _check_signal(X, 1)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_signal(X, 1)
        src = _sim.PlaneWaveSource(self.colatitude, self.azimuth, X[:, 0], self.sample_rate)
        return _sim.surface_pressure(src, self.geometry, self.order_sim).signals.T
