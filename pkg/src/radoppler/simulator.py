"""Synthetic FMCW cubes with programmable micro-Doppler signatures.

Point scatterers follow a stop-and-hop model: range is frozen within a
chirp and advances between chirps as the integral of a base velocity
plus a sinusoidal velocity oscillation. Each chirp contributes a
dechirped beat tone whose frequency encodes range and whose phase
history across chirps encodes Doppler, so every downstream stage has a
closed-form ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import AliasingError, FileFormatError
from .ingest import SPEED_OF_LIGHT, RadarCube, RadarParams, format_kv, parse_kv

__all__ = [
    "ScattererSpec",
    "Scenario",
    "PRESET_NAMES",
    "synthesize",
    "preset",
    "save_scenario",
    "load_scenario",
]


@dataclass(frozen=True)
class ScattererSpec:
    """One point scatterer: range trajectory plus return amplitude.

    The instantaneous velocity is
    base_velocity + micro_amp * sin(2*pi*micro_freq*t + micro_phase).
    """

    base_range: float  # meters
    base_velocity: float = 0.0  # m/s
    micro_amp: float = 0.0  # m/s velocity oscillation amplitude
    micro_freq: float = 0.0  # Hz
    micro_phase: float = 0.0  # radians
    rcs: float = 1.0  # linear amplitude

    def __post_init__(self):
        if self.base_range <= 0:
            raise ValueError("base_range must be positive")
        if self.micro_freq < 0 or self.micro_amp < 0:
            raise ValueError("micro_freq and micro_amp must be non-negative")
        if self.rcs <= 0:
            raise ValueError("rcs must be positive")

    def peak_doppler(self, center_freq: float) -> float:
        """Largest instantaneous Doppler magnitude, Hz."""
        v_peak = abs(self.base_velocity) + self.micro_amp
        return 2.0 * v_peak * center_freq / SPEED_OF_LIGHT

    def range_at(self, t: np.ndarray) -> np.ndarray:
        """Closed-form integral of the velocity profile from time 0."""
        r = self.base_range + self.base_velocity * t
        if self.micro_amp == 0.0:
            return r
        if self.micro_freq == 0.0:
            # zero-rate oscillation degenerates to a constant velocity offset
            return r + self.micro_amp * math.sin(self.micro_phase) * t
        w = 2.0 * math.pi * self.micro_freq
        return r + self.micro_amp / w * (math.cos(self.micro_phase) - np.cos(w * t + self.micro_phase))


@dataclass(frozen=True)
class Scenario:
    params: RadarParams
    scatterers: tuple[ScattererSpec, ...]
    noise_power: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if not self.scatterers:
            raise ValueError("scenario needs at least one scatterer")
        if self.noise_power < 0:
            raise ValueError("noise_power must be non-negative")


def _check_aliasing(scenario: Scenario) -> None:
    limit = scenario.params.chirp_repetition_freq / 2.0
    for idx, sc in enumerate(scenario.scatterers):
        peak = sc.peak_doppler(scenario.params.center_freq)
        if peak >= limit:
            raise AliasingError(
                f"scatterer {idx}: peak Doppler {peak:.1f} Hz reaches the "
                f"unambiguous limit {limit:.1f} Hz (chirp_repetition_freq/2)"
            )


def synthesize(scenario: Scenario) -> RadarCube:
    """Render a scenario into a raw radar cube.

    Scatterers superpose coherently; circular complex Gaussian noise of
    the configured power is drawn from a generator seeded with
    scenario.seed, so equal scenarios produce bit-identical cubes.
    """
    _check_aliasing(scenario)
    p = scenario.params
    t_chirp = p.chirp_duration
    fast = np.arange(p.num_fast_samples)[:, None]
    t_slow = np.arange(p.num_chirps) / p.chirp_repetition_freq

    samples = np.zeros((p.num_fast_samples, p.num_chirps), dtype=np.complex128)
    for sc in scenario.scatterers:
        rng_range = sc.range_at(t_slow)
        beat = 2.0 * p.bandwidth * rng_range / (SPEED_OF_LIGHT * t_chirp)
        phase = 2.0 * math.pi * (
            beat[None, :] * fast / p.sample_rate
            + 2.0 * p.center_freq * rng_range[None, :] / SPEED_OF_LIGHT
        )
        samples += sc.rcs * np.exp(1j * phase)

    if scenario.noise_power > 0:
        rng = np.random.default_rng(scenario.seed)
        sigma = math.sqrt(scenario.noise_power / 2.0)
        samples += sigma * rng.standard_normal(samples.shape)
        samples += 1j * sigma * rng.standard_normal(samples.shape)
    return RadarCube(params=p, samples=samples)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

DEFAULT_PARAMS = RadarParams(
    num_fast_samples=128,
    num_chirps=6000,
    sample_rate=2.0e6,
    chirp_repetition_freq=2000.0,
    center_freq=77.0e9,
    bandwidth=1.5e9,
)

# Velocity amplitudes in m/s; at 77 GHz one m/s is about 513.7 Hz of
# Doppler, and the default 256-bin axis resolves 7.8125 Hz per bin.
_PRESETS = {
    # one wide transient event: several limbs sweep a broad Doppler band
    # together, so the band stays occupied for most of the dwell
    "fall_like": (
        (
            ScattererSpec(base_range=2.0, micro_amp=1.5, micro_freq=0.30, rcs=1.0),
            ScattererSpec(base_range=2.0, micro_amp=1.25, micro_freq=0.27,
                          micro_phase=1.1, rcs=0.9),
            ScattererSpec(base_range=2.1, micro_amp=1.0, micro_freq=0.33,
                          micro_phase=2.2, rcs=0.9),
            ScattererSpec(base_range=2.1, micro_amp=0.7, micro_freq=0.25,
                          micro_phase=3.1, rcs=0.8),
            ScattererSpec(base_range=2.2, micro_amp=0.45, micro_freq=0.36,
                          micro_phase=4.4, rcs=0.8),
            ScattererSpec(base_range=2.2, micro_amp=0.2, micro_freq=0.29,
                          micro_phase=5.3, rcs=0.7),
        ),
        1e-4,
    ),
    # asymmetric gait: one weak fast limb, one stronger slow limb
    "limp_like": (
        (
            ScattererSpec(base_range=2.0, micro_amp=0.22, micro_freq=1.1, rcs=1.0),
            ScattererSpec(base_range=2.1, micro_amp=0.12, micro_freq=1.1,
                          micro_phase=math.pi / 2.0, rcs=0.7),
        ),
        1e-4,
    ),
    # regular gait: torso sway plus a faster limb swing
    "walk_like": (
        (
            ScattererSpec(base_range=2.0, micro_amp=0.25, micro_freq=0.9, rcs=1.0),
            ScattererSpec(base_range=2.1, micro_amp=0.8, micro_freq=1.8, rcs=0.6),
        ),
        1e-4,
    ),
    # motionless reflector: pure zero-Doppler return for clutter checks
    "static_like": (
        (ScattererSpec(base_range=2.0, rcs=1.0),),
        0.0,
    ),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> Scenario:
    """Named scenario with documented constants at DEFAULT_PARAMS."""
    try:
        scatterers, noise_power = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return Scenario(params=DEFAULT_PARAMS, scatterers=scatterers,
                    noise_power=noise_power, seed=1234)


# ---------------------------------------------------------------------------
# scenario files
# ---------------------------------------------------------------------------

_SCATTERER_FIELDS = tuple(f.name for f in fields(ScattererSpec))


def _format_scatterer(sc: ScattererSpec) -> str:
    inner = ", ".join(f"{name}: {getattr(sc, name)!r}" for name in _SCATTERER_FIELDS)
    return "{" + inner + "}"


def _parse_scatterer(block: str, source: str) -> ScattererSpec:
    block = block.strip()
    if not (block.startswith("{") and block.endswith("}")):
        raise FileFormatError(f"{source}: scatterer block must be brace-wrapped, got {block!r}")
    values = {}
    body = block[1:-1].strip()
    if body:
        for item in body.split(","):
            name, sep, value = item.partition(":")
            if not sep:
                raise FileFormatError(f"{source}: expected 'name: value' in {item!r}")
            name = name.strip()
            if name not in _SCATTERER_FIELDS:
                raise FileFormatError(f"{source}: unknown scatterer field {name!r}")
            if name in values:
                raise FileFormatError(f"{source}: duplicate scatterer field {name!r}")
            try:
                values[name] = float(value)
            except ValueError:
                raise FileFormatError(f"{source}: cannot parse {value.strip()!r} as float") from None
    try:
        return ScattererSpec(**values)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{source}: {exc}") from exc


def save_scenario(scenario: Scenario, path) -> Path:
    path = Path(path)
    p = scenario.params
    pairs = [
        ("num_fast_samples", p.num_fast_samples),
        ("num_chirps", p.num_chirps),
        ("sample_rate", p.sample_rate),
        ("chirp_repetition_freq", p.chirp_repetition_freq),
        ("center_freq", p.center_freq),
        ("bandwidth", p.bandwidth),
        ("noise_power", scenario.noise_power),
        ("seed", scenario.seed),
    ]
    pairs += [("scatterer", _format_scatterer(sc)) for sc in scenario.scatterers]
    path.write_text(format_kv(pairs))
    return path


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise FileFormatError(f"scenario file not found: {path}")
    scalars: dict[str, str] = {}
    scatterers = []
    for key, value in parse_kv(path.read_text()):
        if key == "scatterer":
            scatterers.append(_parse_scatterer(value, str(path)))
        elif key in scalars:
            raise FileFormatError(f"{path}: duplicate key {key!r}")
        else:
            scalars[key] = value

    param_kinds = {
        "num_fast_samples": int,
        "num_chirps": int,
        "sample_rate": float,
        "chirp_repetition_freq": float,
        "center_freq": float,
        "bandwidth": float,
    }
    missing = sorted(set(param_kinds) - set(scalars))
    if missing:
        raise FileFormatError(f"{path}: missing keys {missing}")
    unknown = sorted(set(scalars) - set(param_kinds) - {"noise_power", "seed"})
    if unknown:
        raise FileFormatError(f"{path}: unknown keys {unknown}")
    try:
        params = RadarParams(**{k: kind(scalars[k]) for k, kind in param_kinds.items()})
        return Scenario(
            params=params,
            scatterers=tuple(scatterers),
            noise_power=float(scalars.get("noise_power", "0")),
            seed=int(scalars.get("seed", "0")),
        )
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
