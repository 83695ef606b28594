"""
Pipeline configuration: one JSON document covering framing, slope estimation,
slider tracking and two-finger detection. It is echoed into every run report.
"""

from typing import Optional
from enum import Enum
from pathlib import Path
import math

from pydantic import Field, field_validator, model_validator

from gesture_radar.exceptions import SchemaError
from gesture_radar.radar.framing import ChannelBonding
from gesture_radar.schemas.base import BaseModel, FrozenModel, parse_json_model

DEFAULT_WAVELENGTH = 0.005
DEFAULT_SLIDER_RANGE = 100.0
DEFAULT_HAND_TRAVEL = 0.10
DEFAULT_N_PER_FIT = 8
# Same value slider_tracker.calibrate_attenuation(0.10) returns for CB1 defaults
DEFAULT_ATTENUATION = (
    2.0 * DEFAULT_SLIDER_RANGE * DEFAULT_N_PER_FIT * DEFAULT_WAVELENGTH
    / (4.0 * math.pi * DEFAULT_HAND_TRAVEL)
)


class TapStrategy(str, Enum):
    MAX_MAGNITUDE = "max-magnitude"
    AVERAGE = "average"
    AVERAGE_SLOPE = "average-slope"
    MAX_SLOPE = "max-slope"


class PresenceRule(str, Enum):
    MAGNITUDE = "magnitude"
    STD = "std"
    EITHER = "either"


class TrackerConfig(FrozenModel):
    slider_range: float = Field(DEFAULT_SLIDER_RANGE, gt=0, description="L")
    attenuation: float = Field(DEFAULT_ATTENUATION, gt=0, description="alpha")
    slope_gate: float = Field(1.5, ge=0, description="s_Th, rad/sample")
    magnitude_threshold: float = Field(8.0, ge=0, description="M_Th")
    std_threshold: float = Field(0.5, ge=0, description="M_Th^s")
    std_window: int = Field(16, ge=2, description="N_s")
    tap_strategy: TapStrategy = TapStrategy.MAX_MAGNITUDE
    presence_rule: PresenceRule = PresenceRule.MAGNITUDE
    polarity: int = 1
    taps_of_interest: Optional[int] = Field(None, ge=1)
    gating_enabled: bool = True

    @field_validator("polarity")
    @classmethod
    def validate_polarity(cls, v):
        if v not in (-1, 1):
            raise ValueError("polarity must be +1 or -1")
        return v


class DetectorConfig(FrozenModel):
    spectral_threshold: float = Field(40.0, ge=0, description="S_th")
    n_th_pos: int = Field(3, ge=1)
    n_th_neg: int = Field(3, ge=1)
    f_th: float = Field(10.0, gt=0, description="DC exclusion, Hz")
    discard_phase_th: float = Field(math.pi / 2, gt=0, description="alpha_th, rad")
    discard_slope_th: float = Field(1.0, ge=0, description="s_th, rad/sample")
    discard_f_th: float = Field(100.0, gt=0, description="Hz")
    discard_n_pos: int = Field(8, ge=1)
    discard_n_neg: int = Field(8, ge=1)
    vote_k: int = Field(3, ge=3, le=5)
    window_length: int = Field(128, ge=8)
    hop: int = Field(32, ge=1)
    window: str = "hann"
    remove_mean: bool = True
    discard_phase_enabled: bool = True
    discard_slope_enabled: bool = True
    discard_spectrum_enabled: bool = True

    @model_validator(mode="after")
    def validate_bands(self):
        if self.discard_f_th <= self.f_th:
            raise ValueError("discard_f_th must exceed f_th")
        return self

    def without_discards(self) -> "DetectorConfig":
        return self.model_copy(update={
            "discard_phase_enabled": False,
            "discard_slope_enabled": False,
            "discard_spectrum_enabled": False,
        })


class StreamConfig(FrozenModel):
    channel_bonding: ChannelBonding = ChannelBonding.CB1
    n_taps: Optional[int] = Field(None, ge=1)
    tap_spacing_m: Optional[float] = Field(None, gt=0)
    sample_rate_hz: float = Field(500.0, ge=500.0, le=1000.0)
    n_pulses: int = Field(16, ge=1)

    @property
    def resolved_n_taps(self) -> int:
        return self.n_taps or self.channel_bonding.taps_of_interest

    @property
    def resolved_tap_spacing(self) -> float:
        return self.tap_spacing_m or self.channel_bonding.tap_spacing


class SlopeConfig(FrozenModel):
    n_per_fit: int = Field(DEFAULT_N_PER_FIT, ge=5, le=20, description="N_a")
    median_window: int = Field(5, ge=1, description="N_m")
    new_per_iteration: int = Field(8, ge=1, description="N_n")
    history_factor: int = Field(4, ge=1)

    @field_validator("median_window")
    @classmethod
    def validate_median_window(cls, v):
        if v % 2 == 0:
            raise ValueError("median_window must be odd")
        return v

    @model_validator(mode="after")
    def validate_history(self):
        needed = self.n_per_fit * math.ceil(self.new_per_iteration / self.n_per_fit) - self.new_per_iteration
        if needed > self.history_factor * self.n_per_fit:
            raise ValueError("history_factor too small for new_per_iteration")
        return self


class PipelineConfig(BaseModel):
    stream: StreamConfig = Field(default_factory=StreamConfig)
    slopes: SlopeConfig = Field(default_factory=SlopeConfig)
    tracker: TrackerConfig = Field(default_factory=TrackerConfig)
    detector: DetectorConfig = Field(default_factory=DetectorConfig)

    @classmethod
    def from_json(cls, text: str, source: str = "<config>") -> "PipelineConfig":
        return parse_json_model(cls, text, source)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise SchemaError(f"Cannot read config {path}: {e}")
        return cls.from_json(text, source=str(path))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

