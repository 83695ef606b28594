import numpy as np
import pytest
from pydantic import ValidationError

from gesture_radar.exceptions import InvalidArgumentError
from gesture_radar.radar.scene_sim import make_gesture_scene
from gesture_radar.radar.twofinger_detector import (
    ConsecutiveVoter,
    TwoFingerDetector,
    band_counts,
    band_sets,
    detect_window,
    discard_by_phase,
    discard_by_slope,
    discard_by_spectrum,
    spectrum,
    vote,
)
from gesture_radar.schemas.config import DetectorConfig, PipelineConfig
from gesture_radar.services.pipeline_service import GesturePipeline

FS = 500.0
N = 128
BIN_HZ = FS / N


def _tones(*bins, amplitude=1.0, n=N):
    t = np.arange(n) / FS
    return sum(amplitude * np.exp(2j * np.pi * b * BIN_HZ * t) for b in bins)


class TestSpectrum:
    def test_constant_series_lands_in_dc(self):
        spec = spectrum(np.full(64, 2.0 + 1j), FS, window="boxcar")
        dc = int(np.flatnonzero(spec.freqs == 0)[0])

        assert spec.magnitudes[dc] == pytest.approx(64 * abs(2.0 + 1j))
        np.testing.assert_allclose(np.delete(spec.magnitudes, dc), 0.0, atol=1e-9)

    def test_frequencies_ascending_from_negative_nyquist(self):
        spec = spectrum(np.zeros(N), FS)

        assert np.all(np.diff(spec.freqs) > 0)
        assert spec.freqs[0] == pytest.approx(-FS / 2)
        assert spec.freqs[1] - spec.freqs[0] == pytest.approx(BIN_HZ)

    def test_tone_sign(self):
        """Positive rotation lands on positive frequencies"""
        spec = spectrum(_tones(5), FS)

        assert spec.freqs[np.argmax(spec.magnitudes)] == pytest.approx(5 * BIN_HZ)
        spec = spectrum(_tones(-5), FS)
        assert spec.freqs[np.argmax(spec.magnitudes)] == pytest.approx(-5 * BIN_HZ)

    def test_mean_removal(self):
        spec = spectrum(_tones(0, 6), FS, window="boxcar", remove_mean=True)
        dc = int(np.flatnonzero(spec.freqs == 0)[0])

        assert spec.magnitudes[dc] == pytest.approx(0.0, abs=1e-9)

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            spectrum(np.ones(4), FS)


class TestBands:
    def test_band_sets_exclude_dc_region(self):
        freqs = np.array([-20.0, -10.0, -5.0, 0.0, 5.0, 10.0, 20.0])
        positive, negative = band_sets(freqs, 10.0)

        assert positive.tolist() == [6]
        assert negative.tolist() == [0]

    def test_counts_on_known_spectrum(self):
        spec = spectrum(_tones(5, -8, amplitude=10.0), FS, window="boxcar")

        assert band_counts(spec, f_th=10.0, s_th=100.0) == (1, 1)

    def test_one_sided_rejected_two_sided_accepted(self):
        cfg = DetectorConfig(spectral_threshold=10.0)

        assert not detect_window(spectrum(_tones(5, amplitude=1.0), FS), cfg)
        assert detect_window(spectrum(_tones(5, -5, amplitude=1.0), FS), cfg)

    def test_dc_only_rejected(self):
        assert not detect_window(spectrum(_tones(0, 1), FS), DetectorConfig(spectral_threshold=1.0))


class TestDiscardRules:
    def test_phase_excursion(self):
        small = np.exp(1j * (3.1 + 0.2 * np.sin(np.arange(N) / 5)))
        ramp = np.exp(1j * 0.05 * np.arange(N))

        assert not discard_by_phase(small, np.pi / 2)
        assert discard_by_phase(ramp, np.pi / 2)

    def test_slope_is_absolute(self):
        assert discard_by_slope([0.1, -1.2], 1.0)
        assert not discard_by_slope([0.1, -0.9], 1.0)
        assert not discard_by_slope([], 1.0)

    def test_high_frequency_content(self):
        cfg = DetectorConfig(spectral_threshold=10.0)
        t = np.arange(N) / FS
        # alternating signs keep neighbouring Hann lobes from cancelling
        broadband = sum((-1) ** b * np.exp(2j * np.pi * b * BIN_HZ * t) for b in range(30, 45))

        assert discard_by_spectrum(spectrum(broadband, FS), cfg)
        assert not discard_by_spectrum(spectrum(_tones(5, -5), FS), cfg)


class TestVoting:
    def test_one_event_per_run(self):
        assert vote([True, True, True, True, False, True, True, True], 3) == [2, 7]

    def test_broken_runs_do_not_fire(self):
        assert vote([True, True, False, True, True, False], 3) == []

    def test_voter_counts(self):
        voter = ConsecutiveVoter(3)
        fired = [voter.update(x) for x in [True, True, True]]

        assert fired == [False, False, True]
        assert voter.count == 3

    def test_discarded_window_resets_run(self):
        """A discard two windows into a run restarts the count from zero"""
        voter = ConsecutiveVoter(3)
        fired = [voter.update(x) for x in [True, True]]
        fired.append(voter.update(False))

        assert voter.count == 0
        fired += [voter.update(True) for _ in range(3)]
        assert fired == [False, False, False, False, False, True]
        assert voter.count == 3

    def test_invalid_k(self):
        with pytest.raises(InvalidArgumentError):
            ConsecutiveVoter(0)


class TestDetectorConfig:
    def test_discard_band_above_dc_band(self):
        with pytest.raises(ValidationError):
            DetectorConfig(f_th=120.0, discard_f_th=100.0)

    @pytest.mark.parametrize("k", [2, 6])
    def test_vote_k_range(self, k):
        with pytest.raises(ValidationError):
            DetectorConfig(vote_k=k)

    def test_without_discards(self):
        cfg = DetectorConfig().without_discards()

        assert not (cfg.discard_phase_enabled or cfg.discard_slope_enabled or cfg.discard_spectrum_enabled)


class TestStreamingDetector:
    def _run(self, kind, config=None, **params):
        pipeline = GesturePipeline(config or PipelineConfig())
        pipeline.run(make_gesture_scene(kind, params).simulate())
        return pipeline

    def test_window_schedule(self):
        records = self._run("idle").detector.records

        assert len(records) == 1 + (500 - N) // 32
        assert records[0].start_time == 0.0
        assert records[1].start_time == pytest.approx(32 / FS)

    def test_two_finger_detected_on_palm_tap(self):
        pipeline = self._run("two-finger", seed=12)
        records = pipeline.detector.records

        assert all(r.tap == 2 for r in records)
        assert sum(r.detected and not r.discarded for r in records) >= 3
        assert len(pipeline.events) >= 1
        assert pipeline.events[0].vote_count == 3

    def test_single_finger_never_detected(self):
        records = self._run("single-finger", seed=12).detector.records

        assert not any(r.detected for r in records)
        assert all(r.n_neg < 3 for r in records)

    def test_swipe_discarded_by_phase_rule(self):
        pipeline = self._run("swipe", speed=0.5, seed=3)

        assert pipeline.events == []
        assert all("phase" in r.discard_reasons for r in pipeline.detector.records)

    def test_swipe_fires_with_discards_off(self):
        config = PipelineConfig()
        config = config.model_copy(update={"detector": config.detector.without_discards()})
        pipeline = self._run("swipe", config=config, speed=0.5, seed=3)

        assert any(r.detected for r in pipeline.detector.records)
        assert len(pipeline.events) >= 1

    def test_window_records_are_bounded(self):
        pipeline = GesturePipeline(PipelineConfig())
        pipeline.detector = TwoFingerDetector(pipeline.config.detector, FS, record_history=4)
        pipeline.run(make_gesture_scene("idle", {"seed": 1}).simulate())

        assert len(pipeline.detector.records) == 4
        assert pipeline.detector.records[-1].start_time == pytest.approx(11 * 32 / FS)
        assert pipeline.report().summary.windows == 1 + (500 - N) // 32
