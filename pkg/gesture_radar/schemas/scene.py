"""
Scene files: either an explicit list of targets or a canonical gesture with
parameter overrides, plus the radio they are observed with.

    {
      "name": "two-finger",
      "duration_s": 1.0,
      "seed": 7,
      "radio": {"channel_bonding": "CB1", "noise_variance": 0.01},
      "gesture": {"kind": "two-finger", "params": {"speed": 0.05}}
    }
"""

from typing import Any, Dict, List, Optional, Tuple
from pathlib import Path

from pydantic import Field, field_validator

from gesture_radar.exceptions import InvalidArgumentError, SchemaError
from gesture_radar.radar.framing import ChannelBonding
from gesture_radar.radar.scene_sim import (
    MAX_GESTURE_RANGE,
    MAX_GESTURE_SPEED,
    GestureKind,
    InstabilityModel,
    RadioConfig,
    Scene,
    Target,
    background_targets,
    make_gesture_scene,
)
from gesture_radar.schemas.base import BaseModel, FrozenModel, parse_json_model


class InstabilitySpec(FrozenModel):
    event_rate: float = Field(0.0, ge=0, description="events per second")
    phase_jitter_scale: float = Field(0.0, ge=0, description="rad")
    gain_jitter_scale: float = Field(0.0, ge=0)


class RadioSpec(FrozenModel):
    channel_bonding: ChannelBonding = ChannelBonding.CB1
    n_taps: Optional[int] = Field(None, ge=1)
    wavelength_m: float = Field(0.005, gt=0)
    packet_rate_hz: float = Field(500.0, ge=500.0, le=1000.0)
    n_pulses: int = Field(16, ge=1)
    noise_variance: float = Field(0.0, ge=0)

    def to_radio(self) -> RadioConfig:
        return RadioConfig.for_bonding(
            self.channel_bonding,
            wavelength=self.wavelength_m,
            packet_rate=self.packet_rate_hz,
            n_pulses=self.n_pulses,
            noise_variance=self.noise_variance,
        ) if self.n_taps is None else RadioConfig(
            wavelength=self.wavelength_m,
            tap_spacing=self.channel_bonding.tap_spacing,
            n_taps=self.n_taps,
            packet_rate=self.packet_rate_hz,
            n_pulses=self.n_pulses,
            noise_variance=self.noise_variance,
        )


class TargetSpec(FrozenModel):
    keyframes: List[Tuple[float, float]] = Field(..., min_length=1, description="(time s, range m)")
    amplitude: float = Field(1.0, gt=0)
    instability: Optional[InstabilitySpec] = None
    label: str = ""

    @field_validator("keyframes")
    @classmethod
    def validate_keyframes(cls, v):
        times = [t for t, _ in v]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")
        if any(r < 0 for _, r in v):
            raise ValueError("ranges must be non-negative")
        return v

    def to_target(self) -> Target:
        instability = InstabilityModel(**self.instability.model_dump()) if self.instability else InstabilityModel()
        return Target(tuple(self.keyframes), self.amplitude, instability, self.label)


class GestureParams(FrozenModel):
    """Overrides for a canonical gesture; unset fields keep the simulator defaults"""

    speed: Optional[float] = Field(None, ge=0, le=MAX_GESTURE_SPEED, description="m/s")
    start_range: Optional[float] = Field(None, ge=0, le=MAX_GESTURE_RANGE, description="m")
    amplitude: Optional[float] = Field(None, gt=0)
    finger_amplitude: Optional[float] = Field(None, gt=0)
    finger_spread: Optional[float] = Field(None, ge=0, description="m")
    swing: Optional[float] = Field(None, gt=0, description="m")
    palm_tap: Optional[int] = Field(None, ge=0)
    background_amplitude: Optional[float] = Field(None, ge=0)
    instability: Optional[InstabilitySpec] = None
    palm_instability: Optional[InstabilitySpec] = None

    def to_params(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class GestureSpec(FrozenModel):
    kind: GestureKind
    params: GestureParams = Field(default_factory=GestureParams)


class SceneFile(BaseModel):
    name: str = ""
    duration_s: float = Field(1.0, gt=0, le=600)
    seed: Optional[int] = Field(None, ge=0)
    radio: RadioSpec = Field(default_factory=RadioSpec)
    background_amplitude: float = Field(0.0, ge=0)
    targets: List[TargetSpec] = Field(default_factory=list)
    gesture: Optional[GestureSpec] = None

    @classmethod
    def from_json(cls, text: str, source: str = "<scene>") -> "SceneFile":
        return parse_json_model(cls, text, source)

    @classmethod
    def load(cls, path) -> "SceneFile":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise SchemaError(f"Cannot read scene {path}: {e}")
        return cls.from_json(text, source=str(path))

    def to_scene(self, seed: Optional[int] = None) -> Scene:
        """Build the simulator scene; an explicit seed wins over the file's"""
        seed = seed if seed is not None else (self.seed or 0)
        radio = self.radio.to_radio()
        targets = background_targets(radio, self.background_amplitude)
        targets += [spec.to_target() for spec in self.targets]
        try:
            if self.gesture is None:
                return Scene(tuple(targets), radio, self.duration_s, seed, self.name)
            params = {**self.gesture.params.to_params(), "duration": self.duration_s, "radio": radio, "seed": seed}
            scene = make_gesture_scene(self.gesture.kind, params)
        except InvalidArgumentError as e:
            raise SchemaError(f"Scene {self.name or '<unnamed>'} is not physically valid", [e.message])
        return Scene(scene.targets + tuple(targets), radio, self.duration_s, seed, self.name or scene.name)

    @classmethod
    def from_scene(cls, scene: Scene) -> "SceneFile":
        """Explicit-target description of a simulator scene"""
        radio = scene.radio
        bonding = next(
            (cb for cb in ChannelBonding if abs(cb.tap_spacing - radio.tap_spacing) < 1e-12), None
        )
        if bonding is None:
            raise InvalidArgumentError("Scene radio tap spacing matches no channel bonding mode")
        return cls(
            name=scene.name,
            duration_s=scene.duration,
            seed=scene.seed,
            radio=RadioSpec(
                channel_bonding=bonding,
                n_taps=radio.n_taps,
                wavelength_m=radio.wavelength,
                packet_rate_hz=radio.packet_rate,
                n_pulses=radio.n_pulses,
                noise_variance=radio.noise_variance,
            ),
            targets=[
                TargetSpec(
                    keyframes=list(t.keyframes),
                    amplitude=t.amplitude,
                    instability=None if t.instability.is_disabled else InstabilitySpec(
                        event_rate=t.instability.event_rate,
                        phase_jitter_scale=t.instability.phase_jitter_scale,
                        gain_jitter_scale=t.instability.gain_jitter_scale,
                    ),
                    label=t.label,
                )
                for t in scene.targets
            ],
        )

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True)
