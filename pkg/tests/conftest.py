from importlib import resources

import numpy as np
import pytest

from hoaenc.encoder import ArrayGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture(scope="session")
def em32_path():
    return str(resources.files("hoaenc") / "data" / "em32.cfg")


@pytest.fixture(scope="session")
def gl_geometry():
    """Gauss-Legendre grid, exact to degree 16, on a 4.2 cm sphere."""
    return ArrayGeometry.gauss_legendre(4, 0.042, degree=16)


class RoundTrip:
    """Plane-wave round trips shared by the end-to-end checks.

    White noise (48 kHz, 2 s) from ``n_dirs`` random directions is simulated on
    a Gauss-Legendre grid and encoded at order 4 by both encoder paths.
    """

    fs = 48000
    radius = 0.042
    order = 4
    max_gain_db = 20.0
    fir_length = 1024
    nperseg = 4096

    def __init__(self, n_dirs=10, seed=4):
        import time

        from hoaenc import encoder as enc
        from hoaenc import radial, simulator

        t0 = time.perf_counter()
        rng = np.random.default_rng(seed)
        self.geometry = ArrayGeometry.gauss_legendre(self.order, self.radius, degree=16)
        self.config = radial.RadialConfig(self.radius, 343.0, self.order, self.fs, self.max_gain_db, self.fir_length)
        self.bank = radial.design_fir_bank(self.config)
        self.shm = enc.build_sh_matrix(self.geometry, self.order)
        self.f_alias = enc.aliasing_frequency(self.order, self.radius)
        self.source = rng.standard_normal(2 * self.fs)
        self.directions = [(float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * np.pi))) for _ in range(n_dirs)]
        self.time_out, self.freq_out = [], []
        for d in self.directions:
            mics = simulator.surface_pressure(simulator.PlaneWaveSource(*d, self.source, self.fs), self.geometry)
            self.time_out.append(enc.encode_time_domain(mics, self.geometry, self.shm, self.bank))
            self.freq_out.append(enc.encode_frequency_domain(mics, self.geometry, self.shm, self.bank))
        self.seconds = time.perf_counter() - t0

    def transfer(self, signals):
        """H1 estimate |S_xy / S_xx| from the source to each row of ``signals``,
        after removing the encoder delay."""
        from scipy.signal import csd, welch

        delay = self.bank.group_delay_samples
        x = self.source[: self.source.size - delay]
        f, pxx = welch(x, self.fs, nperseg=self.nperseg)
        _, pxy = csd(x[np.newaxis, :], np.atleast_2d(signals)[:, delay:], self.fs, nperseg=self.nperseg, axis=-1)
        return f, np.abs(pxy / pxx)

    def band(self, f, lo=200.0):
        return (f >= lo) & (f <= 0.8 * self.f_alias)


@pytest.fixture(scope="session")
def roundtrip():
    return RoundTrip()
