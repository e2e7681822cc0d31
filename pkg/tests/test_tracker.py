import numpy as np
import pytest

from radoppler.tracker import (
    SignatureTrack,
    kalman_smooth,
    peak_track,
    track_signature,
    write_track_csv,
)


def shifted_axis(bins, prf=1000.0):
    return (np.arange(bins) - bins // 2) * (prf / bins)


class TestPeakTrack:
    def test_constant_tone(self):
        axis = shifted_axis(64)
        power = np.full((10, 64), 0.1)
        power[:, 40] = 5.0
        np.testing.assert_array_equal(peak_track(power, axis), np.full(10, axis[40]))

    def test_per_frame_peaks(self, rng):
        axis = shifted_axis(32)
        bins = rng.integers(0, 32, size=8)
        power = rng.uniform(0, 1, size=(8, 32))
        power[np.arange(8), bins] = 10.0
        np.testing.assert_array_equal(peak_track(power, axis), axis[bins])

    def test_flat_frame_ties_to_zero(self):
        axis = shifted_axis(16)
        got = peak_track(np.ones((3, 16)), axis)
        np.testing.assert_array_equal(got, np.zeros(3))

    def test_mirror_tie_prefers_lower_index(self):
        axis = shifted_axis(16)
        power = np.zeros((1, 16))
        k = np.flatnonzero(axis == -250.0)[0]
        j = np.flatnonzero(axis == 250.0)[0]
        power[0, [k, j]] = 1.0
        assert peak_track(power, axis)[0] == -250.0

    def test_validation(self):
        with pytest.raises(ValueError, match="2-D"):
            peak_track(np.ones(8), shifted_axis(8))
        with pytest.raises(ValueError, match="length"):
            peak_track(np.ones((2, 8)), shifted_axis(16))


class TestKalmanSmooth:
    def test_constant_input_constant_output(self):
        raw = np.full(50, 123.25)
        np.testing.assert_allclose(kalman_smooth(raw, 0.01), raw, rtol=1e-12)

    def test_tiny_r_follows_measurements(self, rng):
        raw = rng.uniform(-100, 100, size=40)
        out = kalman_smooth(raw, 0.01, q=10.0, r=1e-16)
        np.testing.assert_allclose(out, raw, atol=1e-6)

    def test_shift_equivariance(self, rng):
        raw = rng.normal(0, 10, size=60)
        a = kalman_smooth(raw, 0.008)
        b = kalman_smooth(raw + 500.0, 0.008)
        np.testing.assert_allclose(b - a, 500.0, atol=1e-9)

    def test_first_sample_trusts_measurement(self):
        out = kalman_smooth(np.array([42.0, 42.0, 42.0]), 0.01)
        assert out[0] == pytest.approx(42.0, rel=1e-6)

    def test_deterministic(self, rng):
        raw = rng.normal(0, 5, size=30)
        np.testing.assert_array_equal(kalman_smooth(raw, 0.01), kalman_smooth(raw, 0.01))

    def test_smooths_noise_on_ramp(self, rng):
        dt = 0.008
        t = np.arange(150) * dt
        truth = 40.0 * t - 25.0
        improved = 0
        for _ in range(20):
            raw = truth + rng.normal(0, 2.0, size=truth.size)
            out = kalman_smooth(raw, dt, q=10.0, r=4.0)
            if np.sqrt(np.mean((out - truth) ** 2)) < np.sqrt(np.mean((raw - truth) ** 2)):
                improved += 1
        assert improved >= 18

    def test_validation(self):
        with pytest.raises(ValueError, match="non-empty"):
            kalman_smooth(np.empty(0), 0.01)
        with pytest.raises(ValueError, match="positive"):
            kalman_smooth(np.ones(4), 0.0)
        with pytest.raises(ValueError, match="positive"):
            kalman_smooth(np.ones(4), 0.01, q=-1.0)
        with pytest.raises(ValueError, match="positive"):
            kalman_smooth(np.ones(4), 0.01, r=0.0)


class TestTrackSignature:
    def test_constant_tone_track(self):
        axis = shifted_axis(64)
        power = np.full((40, 64), 0.01)
        power[:, 48] = 3.0
        times = np.arange(40) * 0.016
        track = track_signature(power, axis, times)
        np.testing.assert_array_equal(track.raw_peaks, np.full(40, axis[48]))
        np.testing.assert_allclose(track.smoothed, axis[48], rtol=1e-9)
        np.testing.assert_array_equal(track.frame_times, times)

    def test_smoothed_clipped_to_axis_range(self):
        axis = shifted_axis(16)
        power = np.zeros((6, 16))
        power[:, -1] = 1.0  # peak pinned at the top axis value
        track = track_signature(power, axis, np.arange(6) * 0.1)
        assert track.smoothed.max() <= axis.max()
        assert track.smoothed.min() >= axis.min()

    def test_single_frame_uses_unit_dt(self):
        axis = shifted_axis(8)
        power = np.zeros((1, 8))
        power[0, 5] = 1.0
        track = track_signature(power, axis, np.array([0.0]))
        assert track.smoothed[0] == pytest.approx(axis[5], rel=1e-6)

    def test_times_length_mismatch(self):
        with pytest.raises(ValueError, match="frame_times"):
            track_signature(np.ones((4, 8)), shifted_axis(8), np.arange(3))


class TestSignatureTrack:
    def test_read_only_and_validation(self):
        track = SignatureTrack(raw_peaks=[1.0, 2.0], smoothed=[1.0, 1.5],
                               frame_times=[0.0, 0.1])
        with pytest.raises(ValueError):
            track.raw_peaks[0] = 9.0
        with pytest.raises(ValueError, match="equally long"):
            SignatureTrack(raw_peaks=[1.0], smoothed=[1.0, 2.0], frame_times=[0.0])
        with pytest.raises(ValueError, match="non-empty"):
            SignatureTrack(raw_peaks=[], smoothed=[], frame_times=[])


class TestTrackCsv:
    def test_round_trip(self, tmp_path, rng):
        times = np.arange(12) * 0.016
        raw = rng.normal(0, 30, size=12)
        track = SignatureTrack(raw_peaks=raw, smoothed=kalman_smooth(raw, 0.016),
                               frame_times=times)
        path = write_track_csv(track, tmp_path / "track.csv", axis_kind="ra_center_hz")
        lines = path.read_text().splitlines()
        assert lines[0] == "# axis: ra_center_hz"
        assert lines[1] == "frame_time,raw_peak,smoothed"
        body = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
        np.testing.assert_array_equal(body[:, 0], times)
        np.testing.assert_array_equal(body[:, 1], track.raw_peaks)
        np.testing.assert_array_equal(body[:, 2], track.smoothed)
