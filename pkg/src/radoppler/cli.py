"""Command-line pipeline: simulate -> spectrogram -> ra -> track.

Stages communicate through files so every intermediate artifact can be
inspected and replayed. Each artifact-producing invocation writes one
``<out>.manifest`` recording the command line, the config snapshot,
SHA-256 hashes of inputs and outputs, and (for ra) the corner report;
reruns are byte-identical except for the timestamp line.

Exit codes: 0 success, 1 internal error, 2 invalid input or config.
RADOPPLER_LOG={error|info|debug} sets stderr verbosity; stdout stays
reserved for nothing (all artifacts are files).
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import shlex
import sys
from dataclasses import fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import RadopplerError
from .ingest import (
    PipelineConfig,
    format_kv,
    kv_as_dict,
    load_config,
    load_matrix,
    load_radar_cube,
    parse_kv,
    write_matrix,
    write_radar_cube,
)
from .linspec import Spectrogram, load_spectrogram, save_spectrogram, stft_spectrogram
from .preprocess import clutter_filter, range_transform
from .ra_core import load_ra_sidecar, ra_transform, save_ra_spectrogram
from .simulator import load_scenario, synthesize
from .tracker import track_signature, write_track_csv

log = logging.getLogger("radoppler")


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("RADOPPLER_LOG", "error").lower(), logging.ERROR
    )
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_path, command, argv, inputs, outputs, config=None, extra=()):
    pairs = [
        ("tool_version", __version__),
        ("command", command),
        ("argv", shlex.join(str(a) for a in argv)),
    ]
    if config is not None:
        pairs += [(f"config_{f.name}", getattr(config, f.name)) for f in fields(config)]
    pairs += [("input", f"{p} sha256:{_sha256(p)}") for p in inputs if Path(p).exists()]
    pairs += [("output", f"{p} sha256:{_sha256(p)}") for p in outputs if Path(p).exists()]
    pairs += list(extra)
    pairs.append(("timestamp", datetime.now(timezone.utc).isoformat()))
    manifest = Path(str(out_path) + ".manifest")
    manifest.write_text(format_kv(pairs))
    log.info("wrote %s", manifest)


def _spectrogram_from_cube(cube_path, cfg: PipelineConfig) -> Spectrogram:
    cube = load_radar_cube(cube_path)
    profiles = range_transform(cube)
    profiles = clutter_filter(profiles, cutoff=cfg.notch_cutoff, order=cfg.notch_order)
    return stft_spectrogram(profiles, cfg)


def _sidecar_of(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args, argv) -> None:
    scenario = load_scenario(args.scenario_path)
    cube = synthesize(scenario)
    payload = write_radar_cube(cube, args.out_cube_path)
    sidecar = payload.with_suffix(".meta")
    log.info("wrote %s (%d chirps)", payload, cube.params.num_chirps)
    _write_manifest(payload, "simulate", argv,
                    inputs=[args.scenario_path], outputs=[payload, sidecar])


def cmd_spectrogram(args, argv) -> None:
    cfg = load_config(args.config_path)
    spec = _spectrogram_from_cube(args.cube_path, cfg)
    out = Path(args.out_path)
    if args.format == "pgm":
        # frequency on image rows so a steady tone reads as one bright row
        write_matrix(spec.power.T, out, format="pgm")
        outputs = [out]
    else:
        save_spectrogram(spec, out, format=args.format)
        outputs = [out, _sidecar_of(out)]
    log.info("wrote %s (%d frames x %d bins)", out, spec.num_frames, spec.num_freq_bins)
    inputs = [args.cube_path, _cube_sidecar(args.cube_path), args.config_path]
    _write_manifest(out, "spectrogram", argv, inputs=inputs, outputs=outputs, config=cfg)


def _cube_sidecar(path) -> Path:
    payload = Path(path)
    if payload.suffix != ".iq":
        payload = payload.with_suffix(".iq")
    return payload.with_suffix(".meta")


def cmd_ra(args, argv) -> None:
    cfg = load_config(args.config_path)
    in_path = Path(args.input_path)
    if in_path.suffix == ".iq":
        spec = _spectrogram_from_cube(in_path, cfg)
        inputs = [in_path, _cube_sidecar(in_path), args.config_path]
    else:
        spec = load_spectrogram(in_path)
        inputs = [in_path, _sidecar_of(in_path), args.config_path]

    num_filters = args.M if args.M is not None else cfg.num_filters
    force_bins = None
    if args.force_fc is not None:
        if args.force_fc <= 0:
            raise ValueError("--force-fc must be a positive frequency in Hz")
        force_bins = args.force_fc / spec.hz_per_bin
    ra = ra_transform(spec, num_filters=num_filters, floor=cfg.log_floor,
                      force_fc=force_bins)
    log.info("corner: f_nc=%d f_pc=%d f_c=%d bins (%.2f Hz)%s",
             ra.corner.f_nc, ra.corner.f_pc, ra.corner.f_c,
             ra.corner.f_c * ra.hz_per_bin, " [forced]" if ra.corner.forced else "")

    out = Path(args.out_path)
    if args.format == "pgm":
        write_matrix(ra.power.T, out, format="pgm")
        outputs = [out]
    else:
        save_ra_spectrogram(ra, out, format=args.format)
        outputs = [out, _sidecar_of(out)]
    extra = [
        ("f_nc_bins", ra.corner.f_nc),
        ("f_pc_bins", ra.corner.f_pc),
        ("f_c_bins", ra.corner.f_c),
        ("f_c_hz", ra.corner.f_c * ra.hz_per_bin),
        ("forced", ra.corner.forced),
    ]
    extra += [(f"p_{m}", float(v)) for m, v in enumerate(ra.bank.break_points)]
    _write_manifest(out, "ra", argv, inputs=inputs, outputs=outputs, config=cfg, extra=extra)


def cmd_track(args, argv) -> None:
    in_path = Path(args.matrix_path)
    sidecar = _sidecar_of(in_path)
    kind = None
    if sidecar.exists():
        kind = kv_as_dict(parse_kv(sidecar.read_text()), source=str(sidecar)).get("kind")

    if kind == "spectrogram":
        spec = load_spectrogram(in_path)
        power, axis, times = spec.power, spec.freq_axis, spec.time_axis
        axis_kind = "doppler_hz"
    elif kind == "ra_spectrogram":
        meta = load_ra_sidecar(in_path)
        power = np.asarray(load_matrix(in_path)).real
        m_count = int(meta["num_filters"])
        hz_per_bin = float(meta["hz_per_bin"])
        centers = np.array([float(meta[f"p_{m}"]) for m in range(1, m_count + 1)])
        axis = np.concatenate([-centers[::-1], centers]) * hz_per_bin
        dt = float(meta.get("frame_dt", "0")) or 1.0
        times = np.arange(power.shape[0]) * dt
        axis_kind = "ra_center_hz"
    else:
        power = np.asarray(load_matrix(in_path)).real
        axis = np.arange(power.shape[1], dtype=np.float64)
        times = np.arange(power.shape[0], dtype=np.float64)
        axis_kind = "column_index"

    track = track_signature(power, axis, times, q=args.q, r=args.r)
    out = write_track_csv(track, args.out_csv, axis_kind=axis_kind)
    log.info("wrote %s (%d frames, axis %s)", out, track.raw_peaks.size, axis_kind)
    inputs = [in_path] + ([sidecar] if sidecar.exists() else [])
    _write_manifest(out, "track", argv, inputs=inputs, outputs=[out],
                    extra=[("axis_kind", axis_kind), ("q", args.q), ("r", args.r)])


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radoppler",
        description="Micro-Doppler spectrogram pipeline with resolution-adaptive warping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render a scenario file into a radar cube")
    p.add_argument("scenario_path")
    p.add_argument("out_cube_path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrogram", help="cube -> conventional spectrogram")
    p.add_argument("cube_path")
    p.add_argument("config_path")
    p.add_argument("out_path")
    p.add_argument("--format", choices=("csv", "bin", "pgm"), default="bin")
    p.set_defaults(func=cmd_spectrogram)

    p = sub.add_parser("ra", help="cube or spectrogram -> resolution-adaptive spectrogram")
    p.add_argument("input_path")
    p.add_argument("config_path")
    p.add_argument("out_path")
    p.add_argument("--M", type=int, default=None, help="filter count per half axis")
    p.add_argument("--force-fc", type=float, default=None, dest="force_fc",
                   help="skip corner detection and use this corner frequency in Hz")
    p.add_argument("--format", choices=("csv", "bin", "pgm"), default="bin")
    p.set_defaults(func=cmd_ra)

    p = sub.add_parser("track", help="matrix -> dominant-signature CSV track")
    p.add_argument("matrix_path")
    p.add_argument("out_csv")
    p.add_argument("--q", type=float, default=10.0, help="process noise density")
    p.add_argument("--r", type=float, default=4.0, help="measurement noise variance")
    p.set_defaults(func=cmd_track)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    raw_argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(raw_argv)
    try:
        args.func(args, raw_argv)
        return 0
    except (RadopplerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        log.debug("unexpected failure", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())
