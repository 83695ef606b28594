"""
Synthetic tap streams for moving point targets.

Every reading is the coherent sum of N_p pulses; each pulse at tap i is

    X = sum over targets in tap i of alpha * A * exp(j*phi) + n

with the two-way phase phi = -4*pi*r/lambda, alpha the multiplicative
instability factor of the target, and n circular complex thermal noise.
Targets occupy the tap nearest to their range and vanish beyond the last tap.
"""

from typing import Dict, Any, List, Optional, Sequence, Tuple
from dataclasses import dataclass, field, replace
from enum import Enum
import logging

import numpy as np

from gesture_radar.exceptions import InvalidArgumentError
from gesture_radar.radar.framing import (
    ChannelBonding,
    TapFrame,
    combine_pulse_array,
    coherent_combine,
)
from gesture_radar.radar.golay_codec import GolayPair, build_ce_field, channel_estimate

logger = logging.getLogger(__name__)

MAX_GESTURE_SPEED = 2.0  # m/s
MAX_GESTURE_RANGE = 0.40  # m


@dataclass(frozen=True)
class InstabilityModel:
    event_rate: float = 0.0
    phase_jitter_scale: float = 0.0
    gain_jitter_scale: float = 0.0

    def __post_init__(self):
        if min(self.event_rate, self.phase_jitter_scale, self.gain_jitter_scale) < 0:
            raise InvalidArgumentError("Instability parameters must be non-negative")

    @property
    def is_disabled(self) -> bool:
        return self.event_rate == 0 or (self.phase_jitter_scale == 0 and self.gain_jitter_scale == 0)

    def sample_alpha(self, times: np.ndarray, duration: float, rng: np.random.Generator) -> np.ndarray:
        """Piecewise-constant alpha(t), compounded at Poisson event times"""
        if self.is_disabled:
            return np.ones(times.size, dtype=np.complex128)
        # Draw inter-arrival gaps until the stream is covered
        expected = max(1, int(np.ceil(self.event_rate * duration * 2 + 10)))
        gaps = rng.exponential(1.0 / self.event_rate, size=expected)
        event_times = np.cumsum(gaps)
        while event_times[-1] <= duration:
            more = np.cumsum(rng.exponential(1.0 / self.event_rate, size=expected)) + event_times[-1]
            event_times = np.concatenate([event_times, more])
        event_times = event_times[event_times <= duration]
        n_events = event_times.size
        theta = rng.uniform(-self.phase_jitter_scale, self.phase_jitter_scale, size=n_events)
        gain = 1.0 + rng.uniform(-self.gain_jitter_scale, self.gain_jitter_scale, size=n_events)
        factors = gain * np.exp(1j * theta)
        cumulative = np.concatenate([[1.0 + 0j], np.cumprod(factors)])
        return cumulative[np.searchsorted(event_times, times, side="right")]


@dataclass(frozen=True)
class Target:
    keyframes: Tuple[Tuple[float, float], ...]
    amplitude: float = 1.0
    instability: InstabilityModel = field(default_factory=InstabilityModel)
    label: str = ""

    def __post_init__(self):
        frames = tuple((float(t), float(r)) for t, r in self.keyframes)
        if not frames:
            raise InvalidArgumentError("A target needs at least one keyframe")
        if any(r < 0 for _, r in frames):
            raise InvalidArgumentError("Target range must be non-negative")
        if any(t1 <= t0 for (t0, _), (t1, _) in zip(frames, frames[1:])):
            raise InvalidArgumentError("Keyframe times must be strictly increasing")
        if self.amplitude <= 0:
            raise InvalidArgumentError("Target amplitude must be positive")
        object.__setattr__(self, "keyframes", frames)

    @classmethod
    def static(cls, range_m: float, amplitude: float = 1.0, **kwargs) -> "Target":
        return cls(keyframes=((0.0, range_m),), amplitude=amplitude, **kwargs)

    def range_at(self, times) -> np.ndarray:
        """Piecewise-linear trajectory, held constant outside the keyframes"""
        kt = np.array([t for t, _ in self.keyframes])
        kr = np.array([r for _, r in self.keyframes])
        return np.interp(np.asarray(times, dtype=np.float64), kt, kr)


@dataclass(frozen=True)
class RadioConfig:
    wavelength: float = 0.005
    tap_spacing: float = ChannelBonding.CB1.tap_spacing
    n_taps: int = ChannelBonding.CB1.taps_of_interest
    packet_rate: float = 500.0
    n_pulses: int = 16
    noise_variance: float = 0.0

    def __post_init__(self):
        if self.wavelength <= 0:
            raise InvalidArgumentError("wavelength must be positive")
        if self.packet_rate <= 0:
            raise InvalidArgumentError("packet_rate must be positive")
        if self.tap_spacing <= 0 or self.n_taps < 1 or self.n_pulses < 1:
            raise InvalidArgumentError("tap_spacing, n_taps and n_pulses must be positive")
        if self.noise_variance < 0:
            raise InvalidArgumentError("noise_variance must be non-negative")

    @classmethod
    def for_bonding(cls, bonding: ChannelBonding, **kwargs) -> "RadioConfig":
        return cls(tap_spacing=bonding.tap_spacing, n_taps=bonding.taps_of_interest, **kwargs)

    @property
    def packet_interval(self) -> float:
        return 1.0 / self.packet_rate

    def tap_index(self, range_m: np.ndarray) -> np.ndarray:
        return np.rint(np.asarray(range_m) / self.tap_spacing).astype(np.int64)

    def tap_center(self, tap: int) -> float:
        return tap * self.tap_spacing


@dataclass(frozen=True)
class Scene:
    targets: Tuple[Target, ...]
    radio: RadioConfig = field(default_factory=RadioConfig)
    duration: float = 1.0
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))

    def simulate(self, seed: Optional[int] = None) -> List[TapFrame]:
        return simulate_tap_stream(self.targets, self.radio, self.duration, self.seed if seed is None else seed)

    def with_seed(self, seed: int) -> "Scene":
        return replace(self, seed=seed)


def _make_rng(seed: int) -> np.random.Generator:
    # Counter-based generator; identical seeds give bit-identical streams
    return np.random.Generator(np.random.Philox(seed))


def packet_times(radio: RadioConfig, duration: float) -> np.ndarray:
    if duration <= 0:
        raise InvalidArgumentError("duration must be positive")
    n = int(np.floor(duration * radio.packet_rate + 1e-9))
    return np.arange(n, dtype=np.float64) / radio.packet_rate


def _echo_matrix(
    targets: Sequence[Target],
    radio: RadioConfig,
    times: np.ndarray,
    duration: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Noise-free per-pulse echo, (n_readings, N_T)"""
    echo = np.zeros((times.size, radio.n_taps), dtype=np.complex128)
    rows = np.arange(times.size)
    for target in targets:
        ranges = target.range_at(times)
        alpha = target.instability.sample_alpha(times, duration, rng)
        phase = -4.0 * np.pi * ranges / radio.wavelength
        taps = radio.tap_index(ranges)
        inside = taps < radio.n_taps
        if not np.all(inside):
            logger.debug(f"Target {target.label or '?'} outside observed taps for {np.count_nonzero(~inside)} readings")
        np.add.at(
            echo,
            (rows[inside], taps[inside]),
            (alpha * target.amplitude * np.exp(1j * phase))[inside],
        )
    return echo


def _thermal_noise(shape: tuple, variance: float, rng: np.random.Generator) -> np.ndarray:
    if variance == 0:
        return np.zeros(shape, dtype=np.complex128)
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate_tap_stream(
    targets: Sequence[Target],
    radio: RadioConfig,
    duration: float,
    seed: int,
) -> List[TapFrame]:
    """One coherently combined TapFrame per packet time"""
    times = packet_times(radio, duration)
    rng = _make_rng(seed)
    echo = _echo_matrix(targets, radio, times, duration, rng)
    pulses = np.repeat(echo[:, np.newaxis, :], radio.n_pulses, axis=1)
    pulses = pulses + _thermal_noise(pulses.shape, radio.noise_variance, rng)
    readings = combine_pulse_array(pulses)
    return [
        TapFrame(taps=row, timestamp=float(t), tap_spacing=radio.tap_spacing)
        for t, row in zip(times, readings)
    ]


def simulate_ce_waveform(
    targets: Sequence[Target],
    radio: RadioConfig,
    pair: GolayPair,
    duration: float,
    seed: int,
) -> np.ndarray:
    """Received CE fields, (n_readings, N_p, 2*(N + N_T)).

    Each pulse is the transmitted CE template convolved with the per-tap
    channel of its reading; thermal noise is added per waveform sample.
    """
    times = packet_times(radio, duration)
    rng = _make_rng(seed)
    echo = _echo_matrix(targets, radio, times, duration, rng)
    template = build_ce_field(pair, radio.n_taps)
    field_len = template.size
    received = np.zeros((times.size, field_len), dtype=np.complex128)
    for delay in range(radio.n_taps):
        shifted = np.zeros(field_len, dtype=np.complex128)
        shifted[delay:] = template[: field_len - delay]
        received += echo[:, delay, np.newaxis] * shifted[np.newaxis, :]
    blocks = np.repeat(received[:, np.newaxis, :], radio.n_pulses, axis=1)
    return blocks + _thermal_noise(blocks.shape, radio.noise_variance, rng)


def estimate_tap_stream(blocks: np.ndarray, pair: GolayPair, radio: RadioConfig) -> List[TapFrame]:
    """channel_estimate every pulse, then coherently combine each reading"""
    blocks = np.asarray(blocks)
    frames = []
    for k, reading in enumerate(blocks):
        t = k * radio.packet_interval
        pulses = [channel_estimate(b, pair, timestamp=t, tap_spacing=radio.tap_spacing) for b in reading]
        frames.append(coherent_combine(pulses))
    return frames


class GestureKind(str, Enum):
    SLIDER_IN = "slider-in"
    SLIDER_OUT = "slider-out"
    TWO_FINGER = "two-finger"
    SINGLE_FINGER = "single-finger"
    PALM_FINGER = "palm-finger"
    IDLE = "idle"
    SWIPE = "swipe"


DEFAULT_GESTURE_PARAMS: Dict[str, Any] = {
    "speed": 0.05,            # m/s, finger or hand radial speed
    "duration": 1.0,          # s
    "start_range": None,      # m, kind-specific default
    "amplitude": 1.0,         # hand / palm
    "finger_amplitude": 0.3,
    "finger_spread": None,    # m, two-finger start separation
    "swing": 0.03,            # m, swipe half-excursion
    "palm_tap": 2,
    "background_amplitude": 0.0,  # opt-in static clutter at every tap
    "noise_variance": 0.01,
    "instability": None,      # dict for the moving/live target
    "palm_instability": None,
    "radio": None,            # RadioConfig override
    "seed": 0,
}


def background_targets(radio: RadioConfig, amplitude: float) -> List[Target]:
    """Static leakage/clutter reflector at the center of every tap"""
    if amplitude <= 0:
        return []
    return [
        Target.static(radio.tap_center(i), amplitude, label=f"background-{i}")
        for i in range(radio.n_taps)
    ]


def _instability(spec) -> InstabilityModel:
    if spec is None:
        return InstabilityModel()
    if isinstance(spec, InstabilityModel):
        return spec
    try:
        return InstabilityModel(**spec)
    except TypeError as e:
        raise InvalidArgumentError(f"Bad instability parameters {spec!r}: {e}")


def make_gesture_scene(kind, params: Optional[Dict[str, Any]] = None) -> Scene:
    """Canonical scenes for the gestures the pipeline recognizes.

    two-finger: strong static palm plus two fingers in the palm tap moving with
    opposing radial velocities for the whole scene. single-finger: the same
    palm with one finger moving in one direction. swipe: a strong hand swinging
    quickly back and forth within one tap.
    """
    try:
        kind = GestureKind(kind)
    except ValueError:
        raise InvalidArgumentError(f"Unknown gesture kind {kind!r}")
    unknown = set(params or {}) - set(DEFAULT_GESTURE_PARAMS)
    if unknown:
        raise InvalidArgumentError(f"Unknown gesture parameters: {sorted(unknown)}")
    p = {**DEFAULT_GESTURE_PARAMS, **(params or {})}

    radio = p["radio"] or RadioConfig(noise_variance=p["noise_variance"])
    try:
        speed = float(p["speed"])
        duration = float(p["duration"])
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"speed and duration must be numbers, got {p['speed']!r} and {p['duration']!r}")
    if not 0 <= speed <= MAX_GESTURE_SPEED:
        raise InvalidArgumentError(f"speed must be within 0..{MAX_GESTURE_SPEED} m/s")
    if duration <= 0:
        raise InvalidArgumentError("duration must be positive")
    if p["start_range"] is not None and not 0 <= p["start_range"] <= MAX_GESTURE_RANGE:
        raise InvalidArgumentError(f"start_range must be within 0..{MAX_GESTURE_RANGE} m")
    if not 0 <= p["palm_tap"] < radio.n_taps:
        raise InvalidArgumentError("palm_tap outside the observed taps")

    live = _instability(p["instability"])
    palm_live = _instability(p["palm_instability"])
    palm_range = radio.tap_center(p["palm_tap"])
    targets = background_targets(radio, p["background_amplitude"])

    def palm() -> Target:
        return Target.static(palm_range, p["amplitude"], instability=palm_live, label="palm")

    if kind is GestureKind.IDLE:
        targets.append(palm())
    elif kind in (GestureKind.SLIDER_IN, GestureKind.SLIDER_OUT):
        travel = speed * duration
        sign = -1.0 if kind is GestureKind.SLIDER_IN else 1.0
        start = p["start_range"]
        if start is None:
            start = MAX_GESTURE_RANGE * 0.6 if sign < 0 else MAX_GESTURE_RANGE * 0.2
        end = start + sign * travel
        if not 0 <= end <= MAX_GESTURE_RANGE:
            raise InvalidArgumentError("slider travel leaves the 0-40 cm zone")
        targets.append(Target(((0.0, start), (duration, end)), p["amplitude"], live, label="hand"))
    elif kind is GestureKind.TWO_FINGER:
        spread = p["finger_spread"] if p["finger_spread"] is not None else speed * duration
        half = spread / 2.0
        targets.append(palm())
        targets.append(Target(((0.0, palm_range - half), (duration, palm_range - half + speed * duration)),
                              p["finger_amplitude"], live, label="index"))
        targets.append(Target(((0.0, palm_range + half), (duration, palm_range + half - speed * duration)),
                              p["finger_amplitude"], live, label="middle"))
    elif kind is GestureKind.SINGLE_FINGER:
        half = speed * duration / 2.0
        targets.append(palm())
        targets.append(Target(((0.0, palm_range + half), (duration, palm_range - half)),
                              p["finger_amplitude"], live, label="index"))
    elif kind is GestureKind.PALM_FINGER:
        finger_range = radio.tap_center(min(p["palm_tap"] + 1, radio.n_taps - 1))
        half = speed * duration / 2.0
        targets.append(palm())
        targets.append(Target(((0.0, finger_range + half), (duration, finger_range - half)),
                              p["finger_amplitude"], live, label="finger"))
    elif kind is GestureKind.SWIPE:
        swing = float(p["swing"])
        if speed == 0 or swing <= 0:
            raise InvalidArgumentError("swipe needs positive speed and swing")
        leg = 2.0 * swing / speed
        t, r, keys = 0.0, palm_range - swing, []
        while t < duration + leg:
            keys.append((t, r))
            t += leg
            r = palm_range + swing if r < palm_range else palm_range - swing
        targets.append(Target(tuple(keys), p["amplitude"], live, label="hand"))

    return Scene(targets=tuple(targets), radio=radio, duration=duration, seed=int(p["seed"]), name=kind.value)
