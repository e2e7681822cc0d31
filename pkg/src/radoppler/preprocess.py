"""Range compression and slow-time clutter suppression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .ingest import RadarCube

__all__ = ["RangeProfileMatrix", "range_transform", "clutter_filter"]


@dataclass(frozen=True)
class RangeProfileMatrix:
    """Complex range-bin x chirp matrix x(r,n) with its physical scales."""

    values: np.ndarray  # [num_range_bins, num_chirps]
    range_resolution: float  # meters per range bin
    chirp_repetition_freq: float  # slow-time sample rate, Hz

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 2 or values.size == 0:
            raise ValueError("range profiles must form a non-empty 2-D matrix")
        if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
            raise ValueError("range profiles contain non-finite values")
        if self.range_resolution <= 0 or self.chirp_repetition_freq <= 0:
            raise ValueError("range_resolution and chirp_repetition_freq must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def num_range_bins(self) -> int:
        return self.values.shape[0]

    @property
    def num_chirps(self) -> int:
        return self.values.shape[1]

    def range_axis(self) -> np.ndarray:
        """Range in meters at each row."""
        return np.arange(self.num_range_bins) * self.range_resolution


def range_transform(cube: RadarCube) -> RangeProfileMatrix:
    """Range-compress a cube: FFT over fast time, keep the positive half.

    No fast-time window is applied. Row r of the result covers ranges
    around r * range_resolution; only bins 0..N/2-1 are kept so complex
    and real beat signals produce the same shape.
    """
    n = cube.params.num_fast_samples
    spectrum = np.fft.fft(cube.samples, n=n, axis=0)
    return RangeProfileMatrix(
        values=spectrum[: n // 2, :],
        range_resolution=cube.params.range_resolution,
        chirp_repetition_freq=cube.params.chirp_repetition_freq,
    )


def clutter_filter(
    profiles: RangeProfileMatrix,
    cutoff: float = 0.01,
    order: int = 4,
) -> RangeProfileMatrix:
    """High-pass each range bin along slow time to remove static returns.

    A Butterworth high-pass (default 4th order, 0.01 Hz cutoff, bilinear
    design) runs causally as cascaded second-order sections over the
    chirp axis, real and imaginary parts identically. The section states
    start at the step response of each row's first sample, so a constant
    row is annihilated to numerical precision instead of decaying over a
    multi-second settling time.
    """
    prf = profiles.chirp_repetition_freq
    if not 0 < cutoff < prf / 2:
        raise ValueError(f"cutoff must sit inside (0, {prf / 2}), got {cutoff}")
    if order < 2 or order % 2:
        raise ValueError(f"order must be even and >= 2, got {order}")
    if profiles.num_chirps < 2:
        raise ValueError("need at least 2 chirps to filter along slow time")
    sos = signal.butter(order, cutoff, btype="highpass", fs=prf, output="sos")
    zi = signal.sosfilt_zi(sos)  # steady-state unit-step initial conditions
    zi = zi[:, np.newaxis, :] * profiles.values[np.newaxis, :, 0, np.newaxis]
    filtered, _ = signal.sosfilt(sos, profiles.values, axis=1, zi=zi)
    return RangeProfileMatrix(
        values=filtered,
        range_resolution=profiles.range_resolution,
        chirp_repetition_freq=prf,
    )
