from typing import Dict, List, Optional, Sequence
from collections import defaultdict
from contextlib import contextmanager
import logging
import time

import numpy as np

from gesture_radar.exceptions import InvalidArgumentError, NumericError
from gesture_radar.radar.framing import StreamBuffer, TapFrame, assemble_batch
from gesture_radar.radar.slider_tracker import SliderSample, SliderTracker
from gesture_radar.radar.slope_pipeline import SlopePipeline
from gesture_radar.radar.twofinger_detector import DetectionEvent, TwoFingerDetector
from gesture_radar.schemas.config import PipelineConfig
from gesture_radar.schemas.report import (
    DetectionEventRow,
    RecordingInfo,
    RunReport,
    RunSummary,
    SliderTraceRow,
)

logger = logging.getLogger(__name__)


class GesturePipeline:
    """framing -> slopes -> slider tracker and two-finger detector, one instance per stream.

    Each iteration consumes N_n new frames; the tracker and the detector see
    the same filtered slopes, so the report order is fixed by the iteration
    order alone.
    """

    def __init__(self, config: PipelineConfig, record_timing: bool = False):
        self.config = config
        self.n_taps = config.stream.resolved_n_taps
        slopes = config.slopes
        self.history = StreamBuffer(slopes.n_per_fit, depth=slopes.history_factor * slopes.n_per_fit)
        self.slopes = SlopePipeline(self.n_taps, slopes.n_per_fit, slopes.median_window)
        self.tracker = SliderTracker(config.tracker, self.n_taps)
        self.detector = TwoFingerDetector(config.detector, config.stream.sample_rate_hz)
        self.record_timing = record_timing
        self.timing: Dict[str, float] = defaultdict(float)
        self.trace: List[SliderSample] = []
        self.events: List[DetectionEvent] = []
        self.frames_seen = 0

    @contextmanager
    def _stage(self, name: str):
        if not self.record_timing:
            yield
            return
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[name] += time.perf_counter() - start

    def step(self, new_frames: Sequence[TapFrame]) -> SliderSample:
        """One processing iteration over the next N_n frames"""
        new_frames = list(new_frames)
        for frame in new_frames:
            if frame.n_taps != self.n_taps:
                raise InvalidArgumentError(f"Frame carries {frame.n_taps} taps, pipeline expects {self.n_taps}")
            if not np.all(np.isfinite(frame.taps)):
                raise NumericError(f"Non-finite tap value at t={frame.timestamp:.4f}s")

        with self._stage("framing"):
            batch = assemble_batch(new_frames, self.history, self.config.slopes.n_per_fit)
        with self._stage("slopes"):
            slopes = self.slopes.process(batch)
        with self._stage("tracker"):
            sample = self.tracker.step(new_frames, slopes.filtered)
        with self._stage("detector"):
            self.detector.push_slopes(slopes.group_end_times, slopes.filtered)
            fired = self.detector.push_frames(new_frames)

        self.frames_seen += len(new_frames)
        self.trace.append(sample)
        self.events.extend(fired)
        for event in fired:
            logger.info(f"Two-finger event at {event.time:.3f}s (tap {event.tap})")
        return sample

    def run(self, frames: Sequence[TapFrame]) -> List[SliderSample]:
        n_new = self.config.slopes.new_per_iteration
        for start in range(0, len(frames), n_new):
            self.step(frames[start:start + n_new])
        logger.info(
            f"Processed {self.frames_seen} frames in {len(self.trace)} iterations: "
            f"{len(self.events)} events, final level {self.tracker.level:.3f}"
        )
        return self.trace

    def report(self, seed: Optional[int] = None, recording: Optional[RecordingInfo] = None) -> RunReport:
        return RunReport(
            seed=seed,
            recording=recording,
            config=self.config,
            summary=RunSummary(
                frames=self.frames_seen,
                iterations=len(self.trace),
                windows=self.detector.windows,
                discarded_windows=self.detector.discarded_windows,
                events=len(self.events),
                final_level=self.tracker.level,
            ),
            trace=[
                SliderTraceRow(time=s.time, level=s.level, enabled=s.enabled, present=s.present, tap=s.tap)
                for s in self.trace
            ],
            events=[
                DetectionEventRow(time=e.time, window_start=e.window_start, tap=e.tap,
                                  n_pos=e.n_pos, n_neg=e.n_neg, vote_count=e.vote_count)
                for e in self.events
            ],
            timing=dict(self.timing) if self.record_timing else None,
        )


def run_pipeline(
    frames: Sequence[TapFrame],
    config: PipelineConfig,
    seed: Optional[int] = None,
    recording: Optional[RecordingInfo] = None,
    record_timing: bool = False,
) -> RunReport:
    pipeline = GesturePipeline(config, record_timing=record_timing)
    with np.errstate(invalid="raise", divide="raise"):
        try:
            pipeline.run(frames)
        except FloatingPointError as e:
            raise NumericError(f"Numeric failure during run: {e}")
    return pipeline.report(seed=seed, recording=recording)
