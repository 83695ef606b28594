"""
Binary tap recordings (.gtap).

Little-endian layout: a 28 byte header of seven uint32 fields

    magic "GTAP" | version | n_taps | tap_spacing_um | sample_rate_hz | n_pulses | count

followed by count * n_taps complex values stored as interleaved float32
(real, imaginary), frames contiguous.
"""

from typing import List, Optional, Sequence
from dataclasses import dataclass
from pathlib import Path
import logging

import numpy as np

from gesture_radar.exceptions import FramingError, InvalidArgumentError, RecordingMismatchError, SchemaError
from gesture_radar.radar.framing import TapFrame, frames_to_matrix
from gesture_radar.schemas.config import PipelineConfig

logger = logging.getLogger(__name__)

MAGIC = b"GTAP"
FORMAT_VERSION = 1
HEADER_DTYPE = np.dtype([
    ("magic", "S4"),
    ("version", "<u4"),
    ("n_taps", "<u4"),
    ("tap_spacing_um", "<u4"),
    ("sample_rate_hz", "<u4"),
    ("n_pulses", "<u4"),
    ("count", "<u4"),
])
PAYLOAD_DTYPE = np.dtype("<c8")


@dataclass(frozen=True)
class RecordingHeader:
    n_taps: int
    tap_spacing_um: int
    sample_rate_hz: int
    n_pulses: int
    count: int
    version: int = FORMAT_VERSION

    @property
    def tap_spacing(self) -> float:
        return self.tap_spacing_um * 1e-6

    @property
    def packet_interval(self) -> float:
        return 1.0 / self.sample_rate_hz

    def to_array(self) -> np.ndarray:
        header = np.zeros(1, dtype=HEADER_DTYPE)
        header[0] = (MAGIC, self.version, self.n_taps, self.tap_spacing_um,
                     self.sample_rate_hz, self.n_pulses, self.count)
        return header


@dataclass(frozen=True, eq=False)
class TapRecording:
    header: RecordingHeader
    payload: np.ndarray  # (count, n_taps) complex64

    @classmethod
    def from_frames(
        cls,
        frames: Sequence[TapFrame],
        sample_rate_hz: float,
        n_pulses: int,
        tap_spacing: Optional[float] = None,
    ) -> "TapRecording":
        if not frames:
            raise InvalidArgumentError("Cannot record an empty stream")
        matrix = frames_to_matrix(frames)
        spacing = tap_spacing if tap_spacing is not None else frames[0].tap_spacing
        header = RecordingHeader(
            n_taps=matrix.shape[1],
            tap_spacing_um=int(round(spacing * 1e6)),
            sample_rate_hz=int(round(sample_rate_hz)),
            n_pulses=n_pulses,
            count=matrix.shape[0],
        )
        return cls(header=header, payload=matrix.astype(PAYLOAD_DTYPE))

    def to_frames(self) -> List[TapFrame]:
        interval = self.header.packet_interval
        return [
            TapFrame(taps=row, timestamp=k * interval, tap_spacing=self.header.tap_spacing)
            for k, row in enumerate(self.payload)
        ]

    def check_against(self, config: PipelineConfig) -> None:
        """Raise RecordingMismatchError if the pipeline config cannot read this stream"""
        stream = config.stream
        problems = []
        if self.header.n_taps != stream.resolved_n_taps:
            problems.append(f"n_taps: recording {self.header.n_taps}, config {stream.resolved_n_taps}")
        spacing_um = int(round(stream.resolved_tap_spacing * 1e6))
        if self.header.tap_spacing_um != spacing_um:
            problems.append(
                f"tap spacing: recording {self.header.tap_spacing_um} um, config {spacing_um} um "
                f"({stream.channel_bonding.value})"
            )
        if self.header.sample_rate_hz != int(round(stream.sample_rate_hz)):
            problems.append(
                f"sample rate: recording {self.header.sample_rate_hz} Hz, config {stream.sample_rate_hz:g} Hz"
            )
        if problems:
            raise RecordingMismatchError("Recording does not match the pipeline config", problems)
        if self.header.n_pulses != stream.n_pulses:
            logger.warning(f"Recording combines {self.header.n_pulses} pulses, config expects {stream.n_pulses}")


def write_recording(path, recording: TapRecording) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(recording.header.to_array().tobytes())
        f.write(np.ascontiguousarray(recording.payload, dtype=PAYLOAD_DTYPE).tobytes())
    logger.info(f"Wrote {recording.header.count} frames x {recording.header.n_taps} taps to {path}")
    return path


def read_recording(path) -> TapRecording:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise SchemaError(f"Cannot read recording {path}: {e}")
    if len(raw) < HEADER_DTYPE.itemsize:
        raise FramingError(f"{path}: truncated header ({len(raw)} bytes)")
    fields = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(fields["magic"]) != MAGIC:
        raise SchemaError(f"{path}: not a tap recording", [f"magic {bytes(fields['magic'])!r}"])
    if int(fields["version"]) != FORMAT_VERSION:
        raise SchemaError(f"{path}: unsupported recording version {int(fields['version'])}")
    header = RecordingHeader(
        n_taps=int(fields["n_taps"]),
        tap_spacing_um=int(fields["tap_spacing_um"]),
        sample_rate_hz=int(fields["sample_rate_hz"]),
        n_pulses=int(fields["n_pulses"]),
        count=int(fields["count"]),
        version=int(fields["version"]),
    )
    if header.n_taps < 1 or header.sample_rate_hz < 1:
        raise SchemaError(f"{path}: header declares {header.n_taps} taps at {header.sample_rate_hz} Hz")
    expected = header.count * header.n_taps * PAYLOAD_DTYPE.itemsize
    body = raw[HEADER_DTYPE.itemsize:]
    if len(body) != expected:
        raise FramingError(
            f"{path}: payload holds {len(body)} bytes, header implies {expected}",
            [f"count={header.count}", f"n_taps={header.n_taps}"],
        )
    payload = np.frombuffer(body, dtype=PAYLOAD_DTYPE).reshape(header.count, header.n_taps).copy()
    return TapRecording(header=header, payload=payload)
