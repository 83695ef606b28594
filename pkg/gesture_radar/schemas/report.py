"""
Run reports written by `gesture-radar run`.
"""

from typing import Dict, List, Optional
from pathlib import Path

from pydantic import Field

from gesture_radar.exceptions import SchemaError
from gesture_radar.schemas.base import BaseModel, FrozenModel, parse_json_model
from gesture_radar.schemas.config import PipelineConfig


class RecordingInfo(FrozenModel):
    name: str
    n_taps: int
    tap_spacing_m: float
    sample_rate_hz: float
    n_pulses: int
    frame_count: int


class SliderTraceRow(FrozenModel):
    """Tracker state after one processing iteration"""
    time: float
    level: float
    enabled: bool
    present: bool
    tap: Optional[int] = None


class DetectionEventRow(FrozenModel):
    time: float
    window_start: float
    tap: int
    n_pos: int
    n_neg: int
    vote_count: int


class RunSummary(FrozenModel):
    frames: int = 0
    iterations: int = 0
    windows: int = 0
    discarded_windows: int = 0
    events: int = 0
    final_level: float = 0.0


class RunReport(BaseModel):
    seed: Optional[int] = None
    recording: Optional[RecordingInfo] = None
    config: PipelineConfig
    summary: RunSummary = Field(default_factory=RunSummary)
    trace: List[SliderTraceRow] = Field(default_factory=list)
    events: List[DetectionEventRow] = Field(default_factory=list)
    # Only filled with --timing, wall-clock seconds per stage
    timing: Optional[Dict[str, float]] = None

    def to_json(self) -> str:
        exclude = {"timing"} if self.timing is None else None
        return self.model_dump_json(indent=2, exclude=exclude)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def from_json(cls, text: str, source: str = "<report>") -> "RunReport":
        return parse_json_model(cls, text, source)

    @classmethod
    def load(cls, path) -> "RunReport":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise SchemaError(f"Cannot read report {path}: {e}")
        return cls.from_json(text, source=str(path))
