"""Data model and file formats: radar cubes, matrices, pipeline configuration.

File dialects
-------------
Cube payload ``<name>.iq``
    Interleaved I/Q as 32-bit little-endian IEEE-754 floats. The fast-time
    index varies fastest: all samples of chirp 0, then chirp 1, and so on.
Cube sidecar ``<name>.meta``
    Plain-text ``key = value`` lines (see RadarParams field names).
Matrix ``bin``
    16-byte header: magic ``RDMX``, u8 dtype (0 = f64 real, 1 = c128
    complex), 3 reserved bytes, u32 rows, u32 cols, little-endian;
    row-major f64 payload (complex values as re/im pairs).
Matrix ``csv``
    One matrix row per line, comma-separated, ``%.17g`` formatting.
Matrix ``pgm``
    8-bit binary PGM of the log-scaled, min-max-normalized magnitudes;
    display-only, not loadable.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import FileFormatError

SPEED_OF_LIGHT = 299_792_458.0

_MATRIX_MAGIC = b"RDMX"
_MATRIX_HEADER = struct.Struct("<4sB3sII")

WINDOW_KINDS = ("hann", "hamming", "rect")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadarParams:
    """Acquisition geometry of one FMCW dwell.

    sample_rate is the fast-time ADC rate; chirp_repetition_freq is the
    slow-time sampling rate (PRF), so half of it bounds the unambiguous
    Doppler band.
    """

    num_fast_samples: int
    num_chirps: int
    sample_rate: float
    chirp_repetition_freq: float
    center_freq: float
    bandwidth: float

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"RadarParams.{f.name} must be strictly positive")
        if self.chirp_repetition_freq > self.sample_rate:
            raise ValueError("chirp_repetition_freq must not exceed sample_rate")

    @property
    def range_resolution(self) -> float:
        """Meters per range bin (full chirp sampled)."""
        return SPEED_OF_LIGHT / (2.0 * self.bandwidth)

    @property
    def chirp_duration(self) -> float:
        return self.num_fast_samples / self.sample_rate


@dataclass(frozen=True)
class RadarCube:
    """Raw complex fast-time x slow-time sample matrix plus its parameters."""

    params: RadarParams
    samples: np.ndarray  # complex, [num_fast_samples, num_chirps]

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        expected = (self.params.num_fast_samples, self.params.num_chirps)
        if samples.shape != expected:
            raise ValueError(
                f"cube samples shape {samples.shape} does not match params {expected}"
            )
        if not np.all(np.isfinite(samples.real)) or not np.all(np.isfinite(samples.imag)):
            raise ValueError("cube contains non-finite samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for the cube -> spectrogram -> RA-spectrogram pipeline.

    Defaults give a 256-bin signed-frequency axis with a 128-chirp hann
    window. ``coherent`` selects complex range-profile summation; setting
    it false sums magnitudes instead.
    """

    range_bin_start: int = 0
    range_bin_end: int = 63
    window_kind: str = "hann"
    window_length: int = 128
    hop: int = 16
    fft_length: int = 256
    notch_cutoff: float = 0.01
    notch_order: int = 4
    num_filters: int = 64
    log_floor: float = 1e-12
    coherent: bool = True

    def __post_init__(self):
        if not (0 <= self.range_bin_start <= self.range_bin_end):
            raise ValueError("need 0 <= range_bin_start <= range_bin_end")
        if not (1 <= self.hop <= self.window_length <= self.fft_length):
            raise ValueError("need 1 <= hop <= window_length <= fft_length")
        if self.fft_length % 2:
            raise ValueError("fft_length must be even for a symmetric frequency axis")
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"window_kind must be one of {WINDOW_KINDS}")
        if self.num_filters < 2:
            raise ValueError("num_filters must be >= 2")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")
        if self.notch_cutoff <= 0:
            raise ValueError("notch_cutoff must be positive")
        if self.notch_order < 2 or self.notch_order % 2:
            raise ValueError("notch_order must be even and >= 2")


# ---------------------------------------------------------------------------
# key = value sidecar dialect
# ---------------------------------------------------------------------------

def format_kv(pairs) -> str:
    """Render (key, value) pairs as one ``key = value`` line each."""
    lines = []
    for key, value in pairs:
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def parse_kv(text: str) -> list[tuple[str, str]]:
    """Parse the sidecar dialect, preserving key order and repeats."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FileFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        pairs.append((key.strip(), value.strip()))
    return pairs


def kv_as_dict(pairs, *, source: str = "sidecar") -> dict[str, str]:
    out = {}
    for key, value in pairs:
        if key in out:
            raise FileFormatError(f"{source}: duplicate key {key!r}")
        out[key] = value
    return out


def _coerce(value: str, kind: type, key: str):
    try:
        if kind is bool:
            lowered = value.lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ValueError(value)
        if kind is int:
            return int(value)
        return float(value)
    except ValueError:
        raise FileFormatError(f"key {key!r}: cannot parse {value!r} as {kind.__name__}") from None


# ---------------------------------------------------------------------------
# radar cube files
# ---------------------------------------------------------------------------

def _cube_paths(path) -> tuple[Path, Path]:
    payload = Path(path)
    if payload.suffix != ".iq":
        payload = payload.with_suffix(".iq")
    return payload, payload.with_suffix(".meta")


def write_radar_cube(cube: RadarCube, path) -> Path:
    """Write ``<name>.iq`` + ``<name>.meta``; returns the payload path."""
    payload_path, meta_path = _cube_paths(path)
    p = cube.params
    meta_path.write_text(format_kv([
        ("num_fast_samples", p.num_fast_samples),
        ("num_chirps", p.num_chirps),
        ("sample_rate", p.sample_rate),
        ("chirp_repetition_freq", p.chirp_repetition_freq),
        ("center_freq", p.center_freq),
        ("bandwidth", p.bandwidth),
    ]))
    # chirp-major on disk: transpose so fast time varies fastest
    chirp_major = np.ascontiguousarray(cube.samples.T)
    iq = np.empty(chirp_major.shape + (2,), dtype="<f4")
    iq[..., 0] = chirp_major.real
    iq[..., 1] = chirp_major.imag
    payload_path.write_bytes(iq.tobytes())
    return payload_path


def load_radar_cube(path) -> RadarCube:
    payload_path, meta_path = _cube_paths(path)
    if not payload_path.exists():
        raise FileFormatError(f"cube payload not found: {payload_path}")
    if not meta_path.exists():
        raise FileFormatError(f"cube sidecar not found: {meta_path}")

    meta = kv_as_dict(parse_kv(meta_path.read_text()), source=str(meta_path))
    required = {
        "num_fast_samples": int,
        "num_chirps": int,
        "sample_rate": float,
        "chirp_repetition_freq": float,
        "center_freq": float,
        "bandwidth": float,
    }
    missing = sorted(set(required) - set(meta))
    if missing:
        raise FileFormatError(f"{meta_path}: missing keys {missing}")
    values = {k: _coerce(meta[k], kind, k) for k, kind in required.items()}
    try:
        params = RadarParams(**values)
    except ValueError as exc:
        raise FileFormatError(f"{meta_path}: {exc}") from exc

    raw = np.frombuffer(payload_path.read_bytes(), dtype="<f4")
    expected = 2 * params.num_fast_samples * params.num_chirps
    if raw.size != expected:
        raise FileFormatError(
            f"{payload_path}: payload holds {raw.size} floats, metadata declares {expected}"
        )
    iq = raw.reshape(params.num_chirps, params.num_fast_samples, 2).astype(np.float64)
    samples = (iq[..., 0] + 1j * iq[..., 1]).T
    if not np.all(np.isfinite(raw)):
        raise FileFormatError(f"{payload_path}: payload contains non-finite samples")
    return RadarCube(params=params, samples=samples)


# ---------------------------------------------------------------------------
# matrix files
# ---------------------------------------------------------------------------

def write_matrix(matrix: np.ndarray, path, format: str = "bin") -> Path:
    """Persist a real or complex matrix as csv, bin, or pgm."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError("matrix must be 2-D and non-empty")
    path = Path(path)
    if format == "bin":
        _write_matrix_bin(matrix, path)
    elif format == "csv":
        _write_matrix_csv(matrix, path)
    elif format == "pgm":
        _write_matrix_pgm(matrix, path)
    else:
        raise ValueError(f"unknown matrix format {format!r}")
    return path


def load_matrix(path) -> np.ndarray:
    """Load a matrix written by write_matrix (csv or bin)."""
    path = Path(path)
    if not path.exists():
        raise FileFormatError(f"matrix file not found: {path}")
    head = path.open("rb").read(4)
    if head == _MATRIX_MAGIC:
        return _load_matrix_bin(path)
    if head[:2] in (b"P5", b"P2"):
        raise FileFormatError(f"{path}: pgm is a display format and cannot be loaded")
    return _load_matrix_csv(path)


def _write_matrix_bin(matrix: np.ndarray, path: Path) -> None:
    complex_kind = np.iscomplexobj(matrix)
    rows, cols = matrix.shape
    header = _MATRIX_HEADER.pack(_MATRIX_MAGIC, 1 if complex_kind else 0, b"\x00" * 3, rows, cols)
    if complex_kind:
        payload = np.ascontiguousarray(matrix, dtype=np.complex128)
        body = payload.view(np.float64).astype("<f8").tobytes()
    else:
        body = np.ascontiguousarray(matrix, dtype="<f8").tobytes()
    path.write_bytes(header + body)


def _load_matrix_bin(path: Path) -> np.ndarray:
    blob = path.read_bytes()
    if len(blob) < _MATRIX_HEADER.size:
        raise FileFormatError(f"{path}: truncated header")
    magic, dtype, _, rows, cols = _MATRIX_HEADER.unpack_from(blob)
    if magic != _MATRIX_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}")
    if dtype not in (0, 1):
        raise FileFormatError(f"{path}: unknown dtype code {dtype}")
    per_value = 16 if dtype else 8
    expected = _MATRIX_HEADER.size + rows * cols * per_value
    if len(blob) != expected:
        raise FileFormatError(
            f"{path}: payload is {len(blob)} bytes, header declares {expected}"
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=_MATRIX_HEADER.size)
    if dtype:
        return (flat[0::2] + 1j * flat[1::2]).reshape(rows, cols)
    return flat.reshape(rows, cols).copy()


def _format_value(v) -> str:
    if isinstance(v, complex) or np.iscomplexobj(v):
        return "%.17g%+.17gj" % (v.real, v.imag)
    return "%.17g" % v


def _write_matrix_csv(matrix: np.ndarray, path: Path) -> None:
    with path.open("w") as fh:
        for row in matrix:
            fh.write(",".join(_format_value(v) for v in row))
            fh.write("\n")


def _load_matrix_csv(path: Path) -> np.ndarray:
    rows = []
    width = None
    complex_kind = False
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FileFormatError(f"{path}:{lineno}: ragged row ({len(cells)} != {width})")
        try:
            parsed = [complex(c) if "j" in c else float(c) for c in cells]
        except ValueError as exc:
            raise FileFormatError(f"{path}:{lineno}: {exc}") from None
        complex_kind = complex_kind or any(isinstance(v, complex) for v in parsed)
        rows.append(parsed)
    if not rows:
        raise FileFormatError(f"{path}: empty matrix file")
    return np.array(rows, dtype=np.complex128 if complex_kind else np.float64)


def _write_matrix_pgm(matrix: np.ndarray, path: Path, floor: float = 1e-12) -> None:
    mags = np.abs(matrix).astype(np.float64)
    peak = mags.max()
    if peak > 0:
        levels = np.log10(np.maximum(mags, floor * peak))
        lo, hi = levels.min(), levels.max()
        if hi > lo:
            pixels = np.rint((levels - lo) / (hi - lo) * 255.0)
        else:
            pixels = np.zeros_like(levels)
    else:
        pixels = np.zeros_like(mags)
    rows, cols = matrix.shape
    with path.open("wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(pixels.astype(np.uint8).tobytes())


# ---------------------------------------------------------------------------
# pipeline config files
# ---------------------------------------------------------------------------

def write_config(cfg: PipelineConfig, path) -> Path:
    path = Path(path)
    path.write_text(format_kv([(f.name, getattr(cfg, f.name)) for f in fields(cfg)]))
    return path


def load_config(path) -> PipelineConfig:
    """Read a config file; keys left out fall back to the defaults."""
    path = Path(path)
    if not path.exists():
        raise FileFormatError(f"config file not found: {path}")
    known = {f.name: f.type for f in fields(PipelineConfig)}
    kinds = {"window_kind": str, "coherent": bool}
    overrides = {}
    for key, value in parse_kv(path.read_text()):
        if key not in known:
            raise FileFormatError(f"{path}: unknown config key {key!r}")
        kind = kinds.get(key)
        if kind is None:
            kind = int if key in (
                "range_bin_start", "range_bin_end", "window_length",
                "hop", "fft_length", "notch_order", "num_filters",
            ) else float
        overrides[key] = value if kind is str else _coerce(value, kind, key)
    try:
        return replace(PipelineConfig(), **overrides)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def matrices_close(a: np.ndarray, b: np.ndarray, rtol: float = 1e-9) -> bool:
    """Relative comparison helper used by format cross-checks."""
    if a.shape != b.shape:
        return False
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return bool(np.abs(a - b).max() <= rtol * scale)


def isfinite_matrix(matrix: np.ndarray) -> bool:
    if np.iscomplexobj(matrix):
        return bool(np.all(np.isfinite(matrix.real)) and np.all(np.isfinite(matrix.imag)))
    return bool(np.all(np.isfinite(matrix)))


def nearly_equal(a: float, b: float, tol: float = 1e-12) -> bool:
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
