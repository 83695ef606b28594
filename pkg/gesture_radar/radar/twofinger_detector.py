"""
Two-finger gesture detection from the spectrum of one tap's time series.

Two fingers moving in opposite radial directions put energy on both sides of
DC. A window is positive when both the positive band (f > f_th) and the
negative band (f < -f_th) hold enough bins above S_th. Windows are discarded
on large phase excursions, large slopes, or strong high-frequency content on
either side; an event needs vote_K consecutive positive windows.
"""

from typing import Iterable, List, Optional, Sequence, Tuple
from dataclasses import dataclass
from collections import deque
import logging

import numpy as np
from scipy import fft as sp_fft
from scipy.signal import get_window

from gesture_radar.exceptions import InvalidArgumentError
from gesture_radar.radar.framing import TapFrame
from gesture_radar.radar.slider_tracker import select_tap_max_magnitude
from gesture_radar.radar.slope_pipeline import unwrap_phases
from gesture_radar.schemas.config import DetectorConfig

logger = logging.getLogger(__name__)

MIN_SPECTRUM_LENGTH = 8
# Window records kept for inspection; older ones only survive in the counters
RECORD_HISTORY = 512


@dataclass(frozen=True, eq=False)
class Spectrum:
    bins: np.ndarray
    freqs: np.ndarray
    window_length: int
    sample_rate: float

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.bins)


def spectrum(series, sample_rate: float, window: str = "hann", remove_mean: bool = False) -> Spectrum:
    """Windowed DFT, bins ordered from the most negative frequency upwards"""
    series = np.asarray(series, dtype=np.complex128).reshape(-1)
    n = series.size
    if n < MIN_SPECTRUM_LENGTH:
        raise InvalidArgumentError(f"Spectrum needs at least {MIN_SPECTRUM_LENGTH} samples, got {n}")
    if sample_rate <= 0:
        raise InvalidArgumentError("sample_rate must be positive")
    if remove_mean:
        series = series - series.mean()
    taper = get_window(window, n, fftbins=True)
    bins = sp_fft.fftshift(sp_fft.fft(series * taper))
    freqs = sp_fft.fftshift(sp_fft.fftfreq(n, d=1.0 / sample_rate))
    return Spectrum(bins=bins, freqs=freqs, window_length=n, sample_rate=float(sample_rate))


def band_sets(freqs, f_th: float) -> Tuple[np.ndarray, np.ndarray]:
    """Indices of F+ = {f > f_th} and F- = {f < -f_th}"""
    freqs = np.asarray(freqs, dtype=np.float64)
    return np.flatnonzero(freqs > f_th), np.flatnonzero(freqs < -f_th)


def band_counts(spec: Spectrum, f_th: float, s_th: float) -> Tuple[int, int]:
    positive, negative = band_sets(spec.freqs, f_th)
    strong = spec.magnitudes >= s_th
    return int(np.count_nonzero(strong[positive])), int(np.count_nonzero(strong[negative]))


def detect_window(spec: Spectrum, cfg: DetectorConfig) -> bool:
    n_pos, n_neg = band_counts(spec, cfg.f_th, cfg.spectral_threshold)
    return n_pos >= cfg.n_th_pos and n_neg >= cfg.n_th_neg


def discard_by_phase(series, alpha_th: float) -> bool:
    """Any unwrapped phase excursion from the first sample beyond alpha_th"""
    phases = unwrap_phases(np.angle(np.asarray(series, dtype=np.complex128)))
    return bool(np.any(np.abs(phases - phases[0]) > alpha_th))


def discard_by_slope(filtered_slopes, s_th: float) -> bool:
    slopes = np.asarray(filtered_slopes, dtype=np.float64)
    return bool(slopes.size and np.any(np.abs(slopes) > s_th))


def discard_by_spectrum(spec: Spectrum, cfg: DetectorConfig) -> bool:
    n_pos, n_neg = band_counts(spec, cfg.discard_f_th, cfg.spectral_threshold)
    return n_pos >= cfg.discard_n_pos or n_neg >= cfg.discard_n_neg


class ConsecutiveVoter:
    """Emits once per run of vote_k consecutive positive windows"""

    def __init__(self, vote_k: int):
        if vote_k < 1:
            raise InvalidArgumentError("vote_k must be at least 1")
        self.vote_k = vote_k
        self.count = 0

    def update(self, positive: bool) -> bool:
        if not positive:
            self.count = 0
            return False
        self.count += 1
        return self.count == self.vote_k


def vote(detections: Iterable[bool], vote_k: int) -> List[int]:
    """Indices of the windows at which an event fires"""
    voter = ConsecutiveVoter(vote_k)
    return [k for k, positive in enumerate(detections) if voter.update(bool(positive))]


@dataclass(frozen=True)
class WindowRecord:
    start_time: float
    tap: int
    n_pos: int
    n_neg: int
    detected: bool
    discard_reasons: Tuple[str, ...]
    vote_count: int
    event: bool

    @property
    def discarded(self) -> bool:
        return bool(self.discard_reasons)


@dataclass(frozen=True)
class DetectionEvent:
    time: float
    window_start: float
    tap: int
    n_pos: int
    n_neg: int
    vote_count: int


class TwoFingerDetector:
    """Streaming detector over moving windows, single writer per stream"""

    def __init__(self, config: DetectorConfig, sample_rate: float, record_history: int = RECORD_HISTORY):
        self.config = config
        self.sample_rate = sample_rate
        self.voter = ConsecutiveVoter(config.vote_k)
        self._frames: deque = deque(maxlen=config.window_length)
        self._slopes: deque = deque()
        self._since_eval = 0
        self.records: deque = deque(maxlen=record_history)
        self.windows = 0
        self.discarded_windows = 0
        self.logger = logging.getLogger(__name__)

    def push_slopes(self, times: Sequence[float], filtered: np.ndarray) -> None:
        """Filtered per-tap slopes, one row per group ending at times[k]"""
        for t, row in zip(times, np.asarray(filtered)):
            self._slopes.append((float(t), np.asarray(row, dtype=np.float64)))

    def push_frames(self, frames: Sequence[TapFrame]) -> List[DetectionEvent]:
        fired = []
        for frame in frames:
            self._frames.append(frame)
            self._since_eval += 1
            if len(self._frames) < self.config.window_length:
                continue
            if self.windows == 0 or self._since_eval >= self.config.hop:
                self._since_eval = 0
                event = self.evaluate_window()
                if event is not None:
                    fired.append(event)
        return fired

    def _window_slopes(self, tap: int, start: float, end: float) -> np.ndarray:
        while self._slopes and self._slopes[0][0] < start:
            self._slopes.popleft()
        return np.array([row[tap] for t, row in self._slopes if start <= t <= end])

    def evaluate_window(self) -> Optional[DetectionEvent]:
        cfg = self.config
        frames = list(self._frames)
        center = frames[len(frames) // 2]
        tap = select_tap_max_magnitude(center)
        series = np.array([f.taps[tap] for f in frames])
        start, end = frames[0].timestamp, frames[-1].timestamp
        spec = spectrum(series, self.sample_rate, window=cfg.window, remove_mean=cfg.remove_mean)
        n_pos, n_neg = band_counts(spec, cfg.f_th, cfg.spectral_threshold)
        detected = n_pos >= cfg.n_th_pos and n_neg >= cfg.n_th_neg

        reasons = []
        if cfg.discard_phase_enabled and discard_by_phase(series, cfg.discard_phase_th):
            reasons.append("phase")
        if cfg.discard_slope_enabled and discard_by_slope(
            self._window_slopes(tap, start, end), cfg.discard_slope_th
        ):
            reasons.append("slope")
        if cfg.discard_spectrum_enabled and discard_by_spectrum(spec, cfg):
            reasons.append("spectrum")

        fired = self.voter.update(detected and not reasons)
        record = WindowRecord(start_time=start, tap=tap, n_pos=n_pos, n_neg=n_neg, detected=detected,
                              discard_reasons=tuple(reasons), vote_count=self.voter.count, event=fired)
        self.records.append(record)
        self.windows += 1
        self.discarded_windows += record.discarded
        self.logger.debug(
            f"window@{start:.3f}s tap={tap} counts=({n_pos},{n_neg}) detected={detected} "
            f"discard={reasons or '-'} votes={self.voter.count}"
        )
        if not fired:
            return None
        return DetectionEvent(time=end, window_start=start, tap=tap, n_pos=n_pos, n_neg=n_neg,
                              vote_count=self.voter.count)
