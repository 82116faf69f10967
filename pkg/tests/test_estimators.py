import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from hoaenc import encoder as enc
from hoaenc import renderer, simulator
from hoaenc.errors import ConfigError
from hoaenc.estimators import AmbisonicEncoder, BinauralRenderer, RigidSpherePlaneWave

FS = 48000.0


@pytest.fixture(scope="module")
def geom():
    return enc.ArrayGeometry.gauss_legendre(4, 0.042, degree=9)


def test_get_set_params_and_clone(geom):
    est = AmbisonicEncoder(geom, order=3, fir_length=256)
    params = est.get_params()
    assert params["order"] == 3 and params["fir_length"] == 256 and params["geometry"] is geom
    est.set_params(max_gain_db=12.0)
    twin = clone(est)
    assert twin.max_gain_db == 12.0 and twin is not est


def test_encoder_matches_functional_api(geom, rng):
    X = rng.standard_normal((700, geom.n_mics))
    est = AmbisonicEncoder(geom, order=4, fir_length=256).fit(X)
    out = est.transform(X)
    assert out.shape == (700, 25)
    assert est.group_delay_samples_ == 128
    ref = enc.encode_time_domain(enc.MicBlock(X.T, FS), geom, est.sh_matrix_, est.filter_bank_)
    np.testing.assert_array_equal(out, ref.signals.T)
    assert list(est.get_feature_names_out()[:3]) == ["acn0", "acn1", "acn2"]


def test_encoder_default_order_and_freq_domain(geom, rng):
    X = rng.standard_normal((300, geom.n_mics))
    est = AmbisonicEncoder(geom, fir_length=128, domain="freq", full=True).fit(X)
    # 50 nodes would allow order 6, but the grid only resolves order 4
    assert est.order_ == 4
    assert est.transform(X).shape == (300 + 127, 25)


def test_encoder_validation(geom, rng):
    with pytest.raises(NotFittedError):
        AmbisonicEncoder(geom).transform(np.zeros((10, geom.n_mics)))
    est = AmbisonicEncoder(geom, fir_length=64).fit()
    with pytest.raises(ConfigError):
        est.transform(np.zeros((10, 3)))
    with pytest.raises(ValueError):
        est.transform(np.full((10, geom.n_mics), np.nan))
    with pytest.raises(ConfigError):
        AmbisonicEncoder(geom, domain="wavelet").fit()


def test_pipeline_constant_hrtf(geom, rng):
    src = rng.standard_normal((4000, 1))
    pipe = make_pipeline(
        RigidSpherePlaneWave(geom, colatitude=1.0, azimuth=2.0, sample_rate=FS),
        AmbisonicEncoder(geom, order=4, fir_length=256),
        BinauralRenderer(renderer.constant_hrtf(4)),
    )
    ears = pipe.fit_transform(src)
    assert ears.shape == (4000, 2)
    np.testing.assert_array_equal(ears[:, 0], ears[:, 1])


def test_plane_wave_transformer(geom, rng):
    x = rng.standard_normal((512, 1))
    out = RigidSpherePlaneWave(geom, 0.5, 0.5, FS, 44).fit(x).transform(x)
    ref = simulator.surface_pressure(simulator.PlaneWaveSource(0.5, 0.5, x[:, 0], FS), geom, 44)
    np.testing.assert_array_equal(out, ref.signals.T)
    with pytest.raises(ConfigError):
        RigidSpherePlaneWave(geom).fit(np.zeros((5, 2)))


def test_renderer_rejects_incomplete_order():
    with pytest.raises(ConfigError):
        BinauralRenderer(renderer.constant_hrtf(1)).fit(np.zeros((5, 3)))
