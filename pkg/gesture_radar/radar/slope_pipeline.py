"""
Phase slopes from batched tap samples.

Per batch and per tap: unwrap the phase (anchored at the batch's first
sample), fit a least-squares line to every group of N_a samples with times
1..N_a, and pass the slopes through a moving median of length N_m.
Slopes are in radians per sample interval.
"""

from typing import Iterable, List, Optional
from dataclasses import dataclass
from collections import deque
import logging

import numpy as np
from sortedcontainers import SortedList

from gesture_radar.exceptions import DegenerateFitError, InvalidArgumentError
from gesture_radar.radar.framing import Batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    mean_time: float
    mean_phase: float
    intercept: Optional[float] = None


@dataclass(frozen=True, eq=False)
class SlopeSequence:
    raw: np.ndarray
    filtered: np.ndarray
    n_per_fit: int
    median_window: int


@dataclass(frozen=True, eq=False)
class BatchSlopes:
    """Slopes of one batch, one row per N_a group and one column per tap"""
    raw: np.ndarray
    filtered: np.ndarray
    group_end_times: np.ndarray

    @property
    def n_groups(self) -> int:
        return self.raw.shape[0]


def unwrap_phases(phases) -> np.ndarray:
    phases = np.asarray(phases, dtype=np.float64)
    if phases.size == 0:
        raise InvalidArgumentError("Cannot unwrap an empty phase sequence")
    return np.unwrap(phases)


def linear_fit_slope(phases, times=None, with_intercept: bool = True) -> LinearFit:
    """a = sum((t - t_mean)(p - p_mean)) / sum((t - t_mean)^2), b = p_mean - a*t_mean"""
    phases = np.asarray(phases, dtype=np.float64).reshape(-1)
    if phases.size < 2:
        raise DegenerateFitError(f"Need at least 2 samples for a fit, got {phases.size}")
    if times is None:
        times = np.arange(1, phases.size + 1, dtype=np.float64)
    else:
        times = np.asarray(times, dtype=np.float64).reshape(-1)
        if times.size != phases.size:
            raise InvalidArgumentError("phases and times must have equal length")
    t_mean = times.mean()
    p_mean = phases.mean()
    dt = times - t_mean
    denom = np.dot(dt, dt)
    if denom == 0:
        raise DegenerateFitError("All sample times are identical")
    slope = float(np.dot(dt, phases - p_mean) / denom)
    intercept = p_mean - slope * t_mean if with_intercept else None
    return LinearFit(slope=slope, mean_time=float(t_mean), mean_phase=float(p_mean), intercept=intercept)


def _group_slopes(unwrapped: np.ndarray, n_per_fit: int) -> np.ndarray:
    """Vectorized fit over the rows of an (n_groups, N_a, ...) array"""
    t = np.arange(1, n_per_fit + 1, dtype=np.float64)
    dt = t - t.mean()
    shape = (1, n_per_fit) + (1,) * (unwrapped.ndim - 2)
    dt = dt.reshape(shape)
    centered = unwrapped - unwrapped.mean(axis=1, keepdims=True)
    return np.sum(dt * centered, axis=1) / np.sum(dt * dt)


def piecewise_slopes(batch: Batch, tap: int, n_per_fit: Optional[int] = None) -> np.ndarray:
    n_per_fit = n_per_fit or batch.n_per_fit
    if n_per_fit < 2:
        raise DegenerateFitError("N_a must be at least 2")
    if len(batch) == 0:
        return np.empty(0)
    if len(batch) % n_per_fit:
        raise InvalidArgumentError(f"Batch of {len(batch)} is not a multiple of N_a={n_per_fit}")
    matrix = batch.matrix()
    if not 0 <= tap < matrix.shape[1]:
        raise InvalidArgumentError(f"Tap {tap} outside 0..{matrix.shape[1] - 1}")
    unwrapped = unwrap_phases(np.angle(matrix[:, tap]))
    return _group_slopes(unwrapped.reshape(-1, n_per_fit), n_per_fit)


class RunningMedian:
    """Exact moving median; uses every available sample during warm-up"""

    def __init__(self, window: int):
        if window < 1:
            raise InvalidArgumentError("Median window must be at least 1")
        self.window = window
        self._queue: deque = deque()
        self._sorted = SortedList()

    def __len__(self) -> int:
        return len(self._queue)

    def update(self, sample: float) -> float:
        if len(self._queue) == self.window:
            self._sorted.remove(self._queue.popleft())
        self._queue.append(sample)
        self._sorted.add(sample)
        return self.median

    @property
    def median(self) -> float:
        n = len(self._sorted)
        if n == 0:
            raise InvalidArgumentError("Median of an empty window")
        half = n // 2
        if n % 2:
            return float(self._sorted[half])
        return 0.5 * (self._sorted[half - 1] + self._sorted[half])


def median_filter(raw_slopes: Iterable[float], window: int) -> np.ndarray:
    """s_k = median(a_{k-N_m+1}, ..., a_k)"""
    running = RunningMedian(window)
    return np.array([running.update(float(a)) for a in raw_slopes], dtype=np.float64)


def slope_sequence(raw_slopes, n_per_fit: int, median_window: int) -> SlopeSequence:
    raw = np.asarray(raw_slopes, dtype=np.float64)
    return SlopeSequence(raw=raw, filtered=median_filter(raw, median_window),
                         n_per_fit=n_per_fit, median_window=median_window)


class SlopePipeline:
    """Per-tap slope estimation across iterations, single writer per stream"""

    def __init__(self, n_taps: int, n_per_fit: int = 8, median_window: int = 5):
        if n_taps < 1:
            raise InvalidArgumentError("n_taps must be at least 1")
        if n_per_fit < 2:
            raise DegenerateFitError("N_a must be at least 2")
        self.n_taps = n_taps
        self.n_per_fit = n_per_fit
        self.median_window = median_window
        self.filters: List[RunningMedian] = [RunningMedian(median_window) for _ in range(n_taps)]
        self.logger = logging.getLogger(__name__)

    def process(self, batch: Batch) -> BatchSlopes:
        if len(batch) == 0:
            empty = np.empty((0, self.n_taps))
            return BatchSlopes(raw=empty, filtered=empty.copy(), group_end_times=np.empty(0))
        matrix = batch.matrix()
        if matrix.shape[1] != self.n_taps:
            raise InvalidArgumentError(
                f"Batch carries {matrix.shape[1]} taps, pipeline expects {self.n_taps}"
            )
        unwrapped = np.unwrap(np.angle(matrix), axis=0)
        groups = unwrapped.reshape(-1, self.n_per_fit, self.n_taps)
        raw = _group_slopes(groups, self.n_per_fit)
        filtered = np.empty_like(raw)
        for k in range(raw.shape[0]):
            for i, running in enumerate(self.filters):
                filtered[k, i] = running.update(raw[k, i])
        end_times = batch.times[self.n_per_fit - 1::self.n_per_fit]
        return BatchSlopes(raw=raw, filtered=filtered, group_end_times=end_times)
