#!/usr/bin/env python3
"""
Gesture radar command line

Simulates gesture scenes into tap recordings, runs the slider tracker and the
two-finger detector over a recording, calibrates thresholds from a noise
recording and exports run reports as CSV.

Usage:
    gesture-radar [--seed N] [--config FILE] [--quiet | --verbose] COMMAND ...

Commands:
    simulate SCENE.json -o OUT.gtap      (or --gesture KIND instead of a scene file)
    run REC.gtap -o REPORT.json [--timing]
    calibrate REC.gtap -o CONFIG.json [--margin 2.0]
    export REPORT.json -o DIR

Exit codes: 0 success, 2 input schema error, 3 config/recording mismatch,
4 numeric failure.
"""

from typing import List, Optional
from pathlib import Path
import argparse
import logging
import sys

import numpy as np

from gesture_radar.core.config import settings
from gesture_radar.core.logging import resolve_level, setup_logging
from gesture_radar.exceptions import GestureRadarError, NumericError
from gesture_radar.radar.golay_codec import generate_golay_pair
from gesture_radar.radar.scene_sim import GestureKind, estimate_tap_stream, make_gesture_scene, simulate_ce_waveform
from gesture_radar.schemas.config import PipelineConfig
from gesture_radar.schemas.report import RecordingInfo, RunReport
from gesture_radar.schemas.scene import SceneFile
from gesture_radar.services.calibration_service import DEFAULT_MARGIN, calibrate
from gesture_radar.services.export_service import export_report
from gesture_radar.services.pipeline_service import run_pipeline
from gesture_radar.services.recording import TapRecording, read_recording, write_recording

logger = logging.getLogger(__name__)

EXIT_OK = 0
NUMERIC_EXIT_CODE = NumericError.exit_code


def load_config(path: Optional[str]) -> PipelineConfig:
    """--config wins; otherwise the shipped default file, otherwise built-in defaults"""
    if path:
        return PipelineConfig.load(path)
    if settings.default_config_exists:
        return PipelineConfig.load(settings.DEFAULT_CONFIG_PATH)
    logger.debug("No config file found, using built-in defaults")
    return PipelineConfig()


def cmd_simulate(args) -> int:
    if args.gesture:
        scene = make_gesture_scene(args.gesture, {"seed": args.seed if args.seed is not None else settings.DEFAULT_SEED})
    else:
        scene_file = SceneFile.load(args.scene)
        seed = args.seed if args.seed is not None else scene_file.seed
        scene = scene_file.to_scene(seed=seed if seed is not None else settings.DEFAULT_SEED)

    if args.through_ce:
        pair = generate_golay_pair(args.golay_length)
        blocks = simulate_ce_waveform(scene.targets, scene.radio, pair, scene.duration, scene.seed)
        frames = estimate_tap_stream(blocks, pair, scene.radio)
    else:
        frames = scene.simulate()

    recording = TapRecording.from_frames(frames, scene.radio.packet_rate, scene.radio.n_pulses,
                                         tap_spacing=scene.radio.tap_spacing)
    write_recording(args.output, recording)
    header = recording.header
    print(f"{scene.name or 'scene'}: {header.count} frames x {header.n_taps} taps at "
          f"{header.sample_rate_hz} Hz, {len(scene.targets)} targets, seed {scene.seed} -> {args.output}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = load_config(args.config)
    recording = read_recording(args.recording)
    recording.check_against(config)
    info = RecordingInfo(
        name=Path(args.recording).name,
        n_taps=recording.header.n_taps,
        tap_spacing_m=recording.header.tap_spacing,
        sample_rate_hz=recording.header.sample_rate_hz,
        n_pulses=recording.header.n_pulses,
        frame_count=recording.header.count,
    )
    report = run_pipeline(recording.to_frames(), config, seed=args.seed, recording=info,
                          record_timing=args.timing)
    report.save(args.output)
    summary = report.summary
    print(f"{summary.frames} frames, {summary.iterations} iterations, {summary.windows} windows "
          f"({summary.discarded_windows} discarded): {summary.events} events, "
          f"final level {summary.final_level:.2f} -> {args.output}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    config = load_config(args.config)
    recording = read_recording(args.recording)
    recording.check_against(config)
    result = calibrate(recording.to_frames(), config, margin=args.margin)
    result.config.save(args.output)
    print(f"S_th={result.config.detector.spectral_threshold:.4g} "
          f"M_Th={result.config.tracker.magnitude_threshold:.4g} "
          f"M_Th^s={result.config.tracker.std_threshold:.4g} -> {args.output}")
    return EXIT_OK


def cmd_export(args) -> int:
    report = RunReport.load(args.report)
    paths = export_report(report, args.output)
    print(f"{len(report.trace)} trace rows -> {paths['trace']}, {len(report.events)} events -> {paths['events']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gesture-radar", description="60 GHz gesture radar pipeline")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.PROJECT_VERSION}")
    parser.add_argument("--seed", type=int, help="Simulation seed (overrides the scene file)")
    parser.add_argument("--config", help="Pipeline config JSON")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    verbosity.add_argument("--verbose", action="store_true", help="Enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Simulate a scene into a tap recording")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("scene", nargs="?", help="Scene JSON file")
    source.add_argument("--gesture", choices=[k.value for k in GestureKind], help="Canonical gesture scene")
    simulate.add_argument("-o", "--output", required=True, help="Output .gtap recording")
    simulate.add_argument("--through-ce", action="store_true",
                          help="Simulate CE waveforms and recover taps with the Golay correlator")
    simulate.add_argument("--golay-length", type=int, default=128, help="Golay sequence length for --through-ce")
    simulate.set_defaults(handler=cmd_simulate)

    run = sub.add_parser("run", help="Run the pipeline over a recording")
    run.add_argument("recording", help="Input .gtap recording")
    run.add_argument("-o", "--output", required=True, help="Output report JSON")
    run.add_argument("--timing", action="store_true", help="Record per-stage wall-clock timing in the report")
    run.set_defaults(handler=cmd_run)

    cal = sub.add_parser("calibrate", help="Derive thresholds from a noise/idle recording")
    cal.add_argument("recording", help="Noise or idle .gtap recording")
    cal.add_argument("-o", "--output", required=True, help="Output config JSON")
    cal.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help="Multiplier on the measured floors")
    cal.set_defaults(handler=cmd_calibrate)

    export = sub.add_parser("export", help="Export a run report as CSV")
    export.add_argument("report", help="Report JSON")
    export.add_argument("-o", "--output", required=True, help="Output directory")
    export.set_defaults(handler=cmd_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(level=resolve_level(args.quiet, args.verbose, settings.LOG_LEVEL), log_file=settings.LOG_FILE)
    logger.debug(f"{settings.PROJECT_NAME} {settings.PROJECT_VERSION} ({settings.ENVIRONMENT}): {args.command}")

    try:
        return args.handler(args)
    except GestureRadarError as e:
        logger.error(str(e))
        return e.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as e:
        logger.error(f"Numeric failure: {e}")
        return NUMERIC_EXIT_CODE


if __name__ == "__main__":
    sys.exit(main())
