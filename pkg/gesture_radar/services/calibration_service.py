"""
Threshold calibration from a noise or idle recording (no hand in front of the device).

    S_th    = margin * 99th percentile of the non-DC spectral bins of every tap window
    M_Th    = margin * 99th percentile of the per-frame maximum tap magnitude
    M_Th^s  = margin * 99th percentile of the rolling magnitude std (window N_s)

Each threshold is held at a small positive floor so a noise-free recording
still yields usable values.
"""

from typing import Sequence
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from gesture_radar.exceptions import InvalidArgumentError
from gesture_radar.radar.framing import TapFrame, frames_to_matrix
from gesture_radar.radar.twofinger_detector import MIN_SPECTRUM_LENGTH, band_sets, spectrum
from gesture_radar.schemas.config import PipelineConfig

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 2.0
NOISE_PERCENTILE = 99.0
MIN_SPECTRAL_THRESHOLD = 1e-3
MIN_MAGNITUDE_THRESHOLD = 1e-3
MIN_STD_THRESHOLD = 1e-4


@dataclass(frozen=True)
class CalibrationResult:
    spectral_floor: float
    magnitude_floor: float
    std_floor: float
    margin: float
    windows: int
    config: PipelineConfig


def spectral_noise_floor(frames: Sequence[TapFrame], config: PipelineConfig) -> tuple:
    """99th percentile of |X(f)| over bins outside the DC band, and the window count"""
    det = config.detector
    matrix = frames_to_matrix(frames)
    n = matrix.shape[0]
    length = det.window_length if n >= det.window_length else n
    if length < MIN_SPECTRUM_LENGTH:
        raise InvalidArgumentError(f"Need at least {MIN_SPECTRUM_LENGTH} frames to calibrate, got {n}")
    starts = range(0, n - length + 1, det.hop)
    magnitudes = []
    for start in starts:
        for tap in range(matrix.shape[1]):
            spec = spectrum(matrix[start:start + length, tap], config.stream.sample_rate_hz,
                            window=det.window, remove_mean=det.remove_mean)
            positive, negative = band_sets(spec.freqs, det.f_th)
            magnitudes.append(spec.magnitudes[np.concatenate([positive, negative])])
    return float(np.percentile(np.concatenate(magnitudes), NOISE_PERCENTILE)), len(starts)


def magnitude_floors(frames: Sequence[TapFrame], std_window: int) -> tuple:
    mags = pd.DataFrame(np.abs(frames_to_matrix(frames)))
    peak = float(np.percentile(mags.max(axis=1), NOISE_PERCENTILE))
    rolling = mags.rolling(std_window, min_periods=2).std().max(axis=1).dropna()
    spread = float(np.percentile(rolling, NOISE_PERCENTILE)) if len(rolling) else 0.0
    return peak, spread


def calibrate(frames: Sequence[TapFrame], config: PipelineConfig, margin: float = DEFAULT_MARGIN) -> CalibrationResult:
    if margin <= 0:
        raise InvalidArgumentError("margin must be positive")
    frames = list(frames)
    spectral, windows = spectral_noise_floor(frames, config)
    peak, spread = magnitude_floors(frames, config.tracker.std_window)

    detector = config.detector.model_copy(
        update={"spectral_threshold": max(margin * spectral, MIN_SPECTRAL_THRESHOLD)}
    )
    tracker = config.tracker.model_copy(update={
        "magnitude_threshold": max(margin * peak, MIN_MAGNITUDE_THRESHOLD),
        "std_threshold": max(margin * spread, MIN_STD_THRESHOLD),
    })
    calibrated = config.model_copy(update={"detector": detector, "tracker": tracker})
    logger.info(
        f"Calibrated over {len(frames)} frames ({windows} windows): S_th={detector.spectral_threshold:.4g} "
        f"M_Th={tracker.magnitude_threshold:.4g} M_Th^s={tracker.std_threshold:.4g}"
    )
    return CalibrationResult(spectral_floor=spectral, magnitude_floor=peak, std_floor=spread,
                             margin=margin, windows=windows, config=calibrated)
