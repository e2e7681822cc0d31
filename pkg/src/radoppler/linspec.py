"""Conventional micro-Doppler spectrogram via the short-time Fourier transform."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, FileFormatError
from .ingest import (
    PipelineConfig,
    format_kv,
    kv_as_dict,
    load_matrix,
    parse_kv,
    write_matrix,
)
from .preprocess import RangeProfileMatrix

__all__ = [
    "Spectrogram",
    "window_function",
    "slow_time_signal",
    "stft_spectrogram",
    "log_view",
    "save_spectrogram",
    "load_spectrogram",
]


@dataclass(frozen=True)
class Spectrogram:
    """Time x signed-frequency power matrix.

    power[t, k] is the squared STFT magnitude of frame t at freq_axis[k];
    the axis runs ascending from -f_max to just under +f_max with bin k
    mapping to (k - F/2) * (prf / F) for an even bin count F.
    """

    power: np.ndarray  # [num_frames, num_freq_bins]
    freq_axis: np.ndarray  # Hz, signed, ascending
    time_axis: np.ndarray  # seconds, frame start times
    f_max: float  # Hz, half the chirp repetition frequency

    def __post_init__(self):
        power = np.asarray(self.power, dtype=np.float64)
        freq_axis = np.asarray(self.freq_axis, dtype=np.float64)
        time_axis = np.asarray(self.time_axis, dtype=np.float64)
        if power.ndim != 2 or power.size == 0:
            raise ValueError("power must be a non-empty 2-D matrix")
        if power.shape != (time_axis.size, freq_axis.size):
            raise ValueError("axis lengths do not match the power matrix")
        if freq_axis.size % 2:
            raise ValueError("frequency bin count must be even")
        if np.any(power < 0) or not np.all(np.isfinite(power)):
            raise ValueError("power must be finite and non-negative")
        if self.f_max <= 0:
            raise ValueError("f_max must be positive")
        for arr in (power, freq_axis, time_axis):
            arr.setflags(write=False)
        object.__setattr__(self, "power", power)
        object.__setattr__(self, "freq_axis", freq_axis)
        object.__setattr__(self, "time_axis", time_axis)

    @property
    def num_frames(self) -> int:
        return self.power.shape[0]

    @property
    def num_freq_bins(self) -> int:
        return self.power.shape[1]

    @property
    def hz_per_bin(self) -> float:
        return 2.0 * self.f_max / self.num_freq_bins

    @property
    def frame_dt(self) -> float:
        """Frame spacing in seconds (0.0 when only one frame exists)."""
        if self.time_axis.size < 2:
            return 0.0
        return float(self.time_axis[1] - self.time_axis[0])


def window_function(kind: str, length: int) -> np.ndarray:
    if kind == "hann":
        return np.hanning(length)
    if kind == "hamming":
        return np.hamming(length)
    if kind == "rect":
        return np.ones(length)
    raise ValueError(f"unknown window kind {kind!r}")


def slow_time_signal(profiles: RangeProfileMatrix, cfg: PipelineConfig) -> np.ndarray:
    """Collapse the configured range-bin interval into one slow-time series.

    Coherent mode sums the complex x(r,n) over r (the sum sits inside the
    transform's modulus); non-coherent mode sums magnitudes instead.
    """
    if cfg.range_bin_end >= profiles.num_range_bins:
        raise ValueError(
            f"range bins [{cfg.range_bin_start}, {cfg.range_bin_end}] exceed "
            f"the {profiles.num_range_bins} available bins"
        )
    block = profiles.values[cfg.range_bin_start : cfg.range_bin_end + 1, :]
    if cfg.coherent:
        return block.sum(axis=0)
    return np.abs(block).sum(axis=0).astype(np.complex128)


def stft_spectrogram(profiles: RangeProfileMatrix, cfg: PipelineConfig) -> Spectrogram:
    """Spectrogram of the range-collapsed slow-time signal.

    Frame t covers samples [t*hop, t*hop + window_length); each windowed
    frame is zero-padded to fft_length, transformed, fftshifted so
    negative Doppler comes first, and squared.
    """
    s = slow_time_signal(profiles, cfg)
    if cfg.window_length > s.size:
        raise ValueError(
            f"window_length {cfg.window_length} exceeds the {s.size}-chirp signal"
        )
    num_frames = (s.size - cfg.window_length) // cfg.hop + 1
    offsets = cfg.hop * np.arange(num_frames)
    frames = s[offsets[:, None] + np.arange(cfg.window_length)[None, :]]
    frames = frames * window_function(cfg.window_kind, cfg.window_length)[None, :]
    spectrum = np.fft.fftshift(np.fft.fft(frames, n=cfg.fft_length, axis=1), axes=1)
    power = spectrum.real**2 + spectrum.imag**2

    prf = profiles.chirp_repetition_freq
    freq_axis = (np.arange(cfg.fft_length) - cfg.fft_length // 2) * (prf / cfg.fft_length)
    time_axis = offsets * (1.0 / prf)
    return Spectrogram(power=power, freq_axis=freq_axis, time_axis=time_axis, f_max=prf / 2.0)


def log_view(spec: Spectrogram, floor: float = 1e-12) -> np.ndarray:
    """log10 of the power floored at floor * max(power); display and e(f) input."""
    if floor <= 0:
        raise ValueError("floor must be positive")
    peak = spec.power.max()
    if peak <= 0:
        raise DegenerateInputError("degenerate input: all-zero spectrogram has no log view")
    return np.log10(np.maximum(spec.power, floor * peak))


# ---------------------------------------------------------------------------
# persistence: matrix payload + axis sidecar
# ---------------------------------------------------------------------------

def _sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


def save_spectrogram(spec: Spectrogram, path, format: str = "bin") -> Path:
    """Write the power matrix plus a ``<name>.meta`` axis sidecar."""
    out = write_matrix(spec.power, path, format=format)
    _sidecar_path(out).write_text(format_kv([
        ("kind", "spectrogram"),
        ("num_frames", spec.num_frames),
        ("num_freq_bins", spec.num_freq_bins),
        ("f_max", spec.f_max),
        ("frame_dt", spec.frame_dt),
    ]))
    return out


def load_spectrogram(path) -> Spectrogram:
    path = Path(path)
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise FileFormatError(f"axis sidecar not found: {sidecar}")
    meta = kv_as_dict(parse_kv(sidecar.read_text()), source=str(sidecar))
    if meta.get("kind") != "spectrogram":
        raise FileFormatError(f"{sidecar}: not a spectrogram sidecar")
    missing = sorted({"f_max", "frame_dt"} - set(meta))
    if missing:
        raise FileFormatError(f"{sidecar}: missing keys {missing}")
    power = np.asarray(load_matrix(path)).real
    num_bins = power.shape[1]
    f_max = float(meta["f_max"])
    dt = float(meta["frame_dt"])
    freq_axis = (np.arange(num_bins) - num_bins // 2) * (2.0 * f_max / num_bins)
    time_axis = np.arange(power.shape[0]) * dt
    return Spectrogram(power=power, freq_axis=freq_axis, time_axis=time_axis, f_max=f_max)
