"""
Tap/time framing of Golay correlation outputs.

A correlation stream holds N_T taps per packet; reframing turns it into one
TapFrame per packet so that every tap becomes its own time series sampled at
the packet rate. Consecutive packets are processed in batches whose length is
a multiple of the number of samples per slope fit.
"""

from typing import List, Optional, Sequence
from dataclasses import dataclass
from collections import deque
from enum import Enum
import logging
import math

import numpy as np

from gesture_radar.exceptions import FramingError, InvalidArgumentError

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_PACKET_INTERVAL = 0.002  # 500 Hz
DEFAULT_PULSES_PER_READING = 16
OBSERVED_RANGE_M = 0.40


class ChannelBonding(Enum):
    CB1 = "CB1"
    CB2 = "CB2"

    @property
    def bandwidth_hz(self) -> float:
        return 1.76e9 if self is ChannelBonding.CB1 else 3.52e9

    @property
    def tap_spacing(self) -> float:
        """Range covered by one tap (round trip), about 8 cm for CB1 and 4 cm for CB2"""
        return SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz)

    @property
    def taps_of_interest(self) -> int:
        """Taps covering the 0-40 cm gesture zone"""
        return 5 if self is ChannelBonding.CB1 else 10


@dataclass(frozen=True, eq=False)
class TapFrame:
    taps: np.ndarray
    timestamp: float = 0.0
    tap_spacing: float = ChannelBonding.CB1.tap_spacing

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.complex128).reshape(-1)
        if taps.size < 1:
            raise InvalidArgumentError("A tap frame needs at least one tap")
        object.__setattr__(self, "taps", taps)

    @property
    def n_taps(self) -> int:
        return self.taps.size

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.taps)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.taps)


@dataclass(frozen=True, eq=False)
class Batch:
    frames: tuple
    n_per_fit: int = 8

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) % self.n_per_fit:
            raise FramingError(
                f"Batch of {len(self.frames)} frames is not a multiple of N_a={self.n_per_fit}"
            )
        times = self.times
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise FramingError("Batch times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def times(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames], dtype=np.float64)

    @property
    def n_groups(self) -> int:
        return len(self.frames) // self.n_per_fit

    def matrix(self) -> np.ndarray:
        """Frames stacked as (N_B, N_T)"""
        if not self.frames:
            return np.empty((0, 0), dtype=np.complex128)
        return np.vstack([f.taps for f in self.frames])


def coherent_combine(pulses: Sequence[TapFrame]) -> TapFrame:
    """Complex sum of N_p consecutive pulse correlations, tap by tap.

    The sum is not renormalized by N_p.
    """
    if len(pulses) < 1:
        raise InvalidArgumentError("coherent_combine needs at least one pulse")
    n_taps = pulses[0].n_taps
    if any(p.n_taps != n_taps for p in pulses):
        raise InvalidArgumentError("All pulses must carry the same number of taps")
    total = np.sum(np.vstack([p.taps for p in pulses]), axis=0)
    first = pulses[0]
    return TapFrame(taps=total, timestamp=first.timestamp, tap_spacing=first.tap_spacing)


def combine_pulse_array(pulses: np.ndarray) -> np.ndarray:
    """Vectorized coherent_combine over an (n_readings, N_p, N_T) array"""
    pulses = np.asarray(pulses)
    if pulses.ndim != 3:
        raise InvalidArgumentError("Expected an (n_readings, N_p, N_T) pulse array")
    return pulses.sum(axis=1)


def reframe(
    stream: Sequence[complex],
    n_taps: int,
    start_time: float = 0.0,
    packet_interval: float = DEFAULT_PACKET_INTERVAL,
    tap_spacing: float = ChannelBonding.CB1.tap_spacing,
) -> List[TapFrame]:
    """Split a flat correlation stream into per-packet tap frames.

    Frame t holds samples t*N_T .. (t+1)*N_T-1, so tap i over time is
    samples i, i+N_T, i+2*N_T, ...
    """
    if n_taps < 1:
        raise InvalidArgumentError("n_taps must be at least 1")
    samples = np.asarray(stream, dtype=np.complex128).reshape(-1)
    if samples.size % n_taps:
        raise FramingError(
            f"Stream of {samples.size} samples is not a multiple of N_T={n_taps}"
        )
    rows = samples.reshape(-1, n_taps)
    return [
        TapFrame(taps=row, timestamp=start_time + k * packet_interval, tap_spacing=tap_spacing)
        for k, row in enumerate(rows)
    ]


def flatten(frames: Sequence[TapFrame]) -> np.ndarray:
    """Inverse of reframe"""
    if not frames:
        return np.empty(0, dtype=np.complex128)
    return np.concatenate([f.taps for f in frames])


def tap_series(frames: Sequence[TapFrame], tap: int) -> np.ndarray:
    if not frames:
        return np.empty(0, dtype=np.complex128)
    if not 0 <= tap < frames[0].n_taps:
        raise InvalidArgumentError(f"Tap {tap} outside 0..{frames[0].n_taps - 1}")
    return np.array([f.taps[tap] for f in frames], dtype=np.complex128)


def frames_to_matrix(frames: Sequence[TapFrame]) -> np.ndarray:
    if not frames:
        return np.empty((0, 0), dtype=np.complex128)
    return np.vstack([f.taps for f in frames])


def batch_size(n_new: int, n_per_fit: int) -> int:
    """N_B = N_a * ceil(N_n / N_a)"""
    if n_new < 1:
        raise InvalidArgumentError("N_n must be at least 1")
    if n_per_fit < 2:
        raise InvalidArgumentError("N_a must be at least 2")
    return n_per_fit * math.ceil(n_new / n_per_fit)


class StreamBuffer:
    """Bounded history of past frames, single writer"""

    def __init__(self, n_per_fit: int = 8, depth: Optional[int] = None):
        if n_per_fit < 2:
            raise InvalidArgumentError("N_a must be at least 2")
        self.n_per_fit = n_per_fit
        self.depth = depth if depth is not None else 4 * n_per_fit
        self._frames: deque = deque(maxlen=self.depth)

    def __len__(self) -> int:
        return len(self._frames)

    def push(self, frames: Sequence[TapFrame]) -> None:
        self._frames.extend(frames)

    def tail(self, count: int) -> List[TapFrame]:
        if count <= 0:
            return []
        return list(self._frames)[-count:]

    @property
    def last_timestamp(self) -> Optional[float]:
        return self._frames[-1].timestamp if self._frames else None


def assemble_batch(new: Sequence[TapFrame], history: StreamBuffer, n_per_fit: int) -> Batch:
    """Build the batch for one processing iteration and log the new frames.

    The batch is the last N_B - N_n historical frames followed by the N_n new
    ones. During warm-up, when history is short, the batch is the longest
    N_a-aligned suffix of what is available (possibly empty).
    """
    new = list(new)
    needed = batch_size(len(new), n_per_fit) - len(new)
    if needed > history.depth:
        raise InvalidArgumentError(
            f"History depth {history.depth} cannot supply {needed} frames"
        )
    available = history.tail(needed) + new
    aligned = (len(available) // n_per_fit) * n_per_fit
    frames = available[len(available) - aligned:] if aligned else []
    if aligned < len(new) + needed:
        logger.debug(f"Warm-up batch: {aligned} of {len(new) + needed} frames available")
    history.push(new)
    return Batch(frames=tuple(frames), n_per_fit=n_per_fit)
