import numpy as np
import pytest

from radoppler.linspec import Spectrogram


@pytest.fixture
def make_spec():
    """Factory wrapping a raw power matrix in a Spectrogram with standard axes."""

    def _make(power, prf=1000.0, hop_dt=0.01):
        power = np.asarray(power, dtype=np.float64)
        frames, bins = power.shape
        freq_axis = (np.arange(bins) - bins // 2) * (prf / bins)
        time_axis = np.arange(frames) * hop_dt
        return Spectrogram(power=power, freq_axis=freq_axis,
                           time_axis=time_axis, f_max=prf / 2.0)

    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
