"""
Slider level tracking from filtered phase slopes.

The level integrates attenuated slopes and is clamped to [-L, L]:

    L_t = clamp(L_{t-1} + alpha * s_t, -L, L)

An update only happens while a target is present and every tap's filtered
slope stays below the enabling threshold s_Th. Which tap drives the update is
chosen by one of the tap strategies.
"""

from typing import List, Optional, Sequence
from dataclasses import dataclass
from collections import deque
import logging
import math

import numpy as np

from gesture_radar.exceptions import InvalidArgumentError
from gesture_radar.radar.framing import TapFrame
from gesture_radar.schemas.config import PresenceRule, TapStrategy, TrackerConfig

logger = logging.getLogger(__name__)


def update(prev: float, slope: float, config: TrackerConfig) -> float:
    limit = config.slider_range
    return float(min(max(prev + config.attenuation * slope, -limit), limit))


def _first_argmax(values: np.ndarray) -> int:
    # np.argmax already returns the lowest index among ties
    return int(np.argmax(values))


def select_tap_max_magnitude(frame: TapFrame) -> int:
    return _first_argmax(frame.magnitudes)


def select_tap_max_slope(slopes) -> int:
    slopes = np.asarray(slopes, dtype=np.float64).reshape(-1)
    if slopes.size < 1:
        raise InvalidArgumentError("Need at least one tap slope")
    return _first_argmax(np.abs(slopes))


def fuse_average(values) -> float:
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size < 1:
        raise InvalidArgumentError("Need at least one tap to average")
    return float(values.mean())


def slope_gate(filtered_slopes, s_th: float) -> bool:
    """Enable only when |s_t^(i)| < s_Th for every tap"""
    slopes = np.asarray(filtered_slopes, dtype=np.float64)
    return bool(np.all(np.abs(slopes) < s_th))


def presence_by_magnitude(frame: TapFrame, m_th: float) -> bool:
    return bool(frame.magnitudes.max() > m_th)


def presence_by_std(magnitude_history, m_th_std: float) -> bool:
    """max over taps of the unbiased std of the recent magnitudes, (N_s, N_T) input"""
    history = np.asarray(magnitude_history, dtype=np.float64)
    if history.ndim == 1:
        history = history[:, np.newaxis]
    if history.shape[0] < 2:
        return False
    return bool(np.std(history, axis=0, ddof=1).max() > m_th_std)


def calibrate_attenuation(
    travel_m: float,
    wavelength: float = 0.005,
    n_per_fit: int = 8,
    slider_range: float = 100.0,
) -> float:
    """alpha such that a hand travel of travel_m sweeps the full 2L span.

    The travel accumulates 4*pi*travel/lambda radians of phase; each slope
    update carries N_a samples of it.
    """
    if travel_m <= 0 or wavelength <= 0:
        raise InvalidArgumentError("travel and wavelength must be positive")
    total_slope = 4.0 * math.pi * travel_m / wavelength / n_per_fit
    return 2.0 * slider_range / total_slope


@dataclass(frozen=True, eq=False)
class TrackerState:
    level: float
    tap_levels: np.ndarray
    enabled: bool
    present: bool
    magnitude_history: np.ndarray


@dataclass(frozen=True)
class SliderSample:
    time: float
    level: float
    enabled: bool
    present: bool
    tap: Optional[int]


class SliderTracker:
    """One tracker per stream; mutated only through step()"""

    def __init__(self, config: TrackerConfig, n_taps: int):
        if n_taps < 1:
            raise InvalidArgumentError("n_taps must be at least 1")
        self.config = config
        self.n_taps = n_taps
        self.taps_of_interest = min(config.taps_of_interest or n_taps, n_taps)
        self.level = 0.0
        self.tap_levels = np.zeros(n_taps)
        self.enabled = False
        self.present = False
        self._magnitudes: deque = deque(maxlen=config.std_window)
        self.logger = logging.getLogger(__name__)

    @property
    def state(self) -> TrackerState:
        history = np.array(self._magnitudes) if self._magnitudes else np.empty((0, self.n_taps))
        return TrackerState(level=self.level, tap_levels=self.tap_levels.copy(), enabled=self.enabled,
                            present=self.present, magnitude_history=history)

    def _is_present(self, frame: TapFrame) -> bool:
        rule = self.config.presence_rule
        by_mag = presence_by_magnitude(frame, self.config.magnitude_threshold)
        if rule is PresenceRule.MAGNITUDE:
            return by_mag
        by_std = presence_by_std(np.array(self._magnitudes), self.config.std_threshold)
        if rule is PresenceRule.STD:
            return by_std
        return by_mag or by_std

    def _apply(self, slopes: np.ndarray, frame: TapFrame) -> Optional[int]:
        """One tracker update from a row of per-tap filtered slopes"""
        cfg = self.config
        view = slopes[: self.taps_of_interest] * cfg.polarity
        strategy = cfg.tap_strategy
        if strategy is TapStrategy.MAX_MAGNITUDE:
            tap = select_tap_max_magnitude(
                TapFrame(frame.taps[: self.taps_of_interest], frame.timestamp, frame.tap_spacing)
            )
            self.level = update(self.level, view[tap], cfg)
            return tap
        if strategy is TapStrategy.MAX_SLOPE:
            tap = select_tap_max_slope(view)
            self.level = update(self.level, view[tap], cfg)
            return tap
        if strategy is TapStrategy.AVERAGE_SLOPE:
            self.level = update(self.level, fuse_average(view), cfg)
            return None
        for i in range(self.taps_of_interest):
            self.tap_levels[i] = update(self.tap_levels[i], view[i], cfg)
        self.level = fuse_average(self.tap_levels[: self.taps_of_interest])
        return None

    def step(self, frames: Sequence[TapFrame], filtered_slopes) -> SliderSample:
        """Consume one iteration: its new frames and the filtered slope rows.

        The level is held when no target is present or the slope gate is
        closed; gating can be switched off in the config.
        """
        frames = list(frames)
        slopes = np.asarray(filtered_slopes, dtype=np.float64).reshape(-1, self.n_taps)
        for frame in frames:
            self._magnitudes.append(frame.magnitudes)
        if not frames:
            return SliderSample(time=float("nan"), level=self.level, enabled=self.enabled,
                                present=self.present, tap=None)
        last = frames[-1]
        self.present = self._is_present(last)
        tap = None
        for row in slopes:
            self.enabled = slope_gate(row, self.config.slope_gate)
            if self.config.gating_enabled and not (self.present and self.enabled):
                continue
            tap = self._apply(row, last)
        return SliderSample(time=last.timestamp, level=self.level, enabled=self.enabled,
                            present=self.present, tap=tap)


def replay_levels(slopes: Sequence[float], config: TrackerConfig, start: float = 0.0) -> List[float]:
    """Scalar clamp-fold of a slope stream"""
    levels, level = [], start
    for s in slopes:
        level = update(level, s, config)
        levels.append(level)
    return levels
