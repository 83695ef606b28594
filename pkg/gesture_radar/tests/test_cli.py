import json

import numpy as np
import pytest

from gesture_radar import cli
from gesture_radar.core.config import settings
from gesture_radar.radar.framing import TapFrame
from gesture_radar.schemas.config import PipelineConfig
from gesture_radar.schemas.report import RunReport
from gesture_radar.services.recording import TapRecording, read_recording, write_recording


@pytest.fixture
def simulate(scenes_dir, tmp_path):
    def _simulate(scene_name, *extra):
        out = tmp_path / f"{scene_name}.gtap"
        assert cli.main(["--quiet", *extra, "simulate", str(scenes_dir / f"{scene_name}.json"), "-o", str(out)]) == 0
        return out

    return _simulate


def _run(recording, out, *extra):
    return cli.main(["--quiet", *extra, "run", str(recording), "-o", str(out)])


class TestSimulate:
    def test_writes_recording(self, simulate, capsys):
        rec = read_recording(simulate("idle"))

        assert rec.header.count == 500
        assert rec.header.n_taps == 5
        assert "500 frames x 5 taps" in capsys.readouterr().out

    def test_canonical_gesture(self, tmp_path):
        out = tmp_path / "swipe.gtap"

        assert cli.main(["--quiet", "--seed", "3", "simulate", "--gesture", "swipe", "-o", str(out)]) == 0
        assert read_recording(out).header.count == 500

    def test_through_channel_estimates(self, tmp_path):
        scene = tmp_path / "short.json"
        scene.write_text(json.dumps({
            "duration_s": 0.05,
            "seed": 1,
            "targets": [{"keyframes": [[0.0, 0.26]], "label": "hand"}],
        }))
        out = tmp_path / "ce.gtap"

        assert cli.main(["--quiet", "simulate", str(scene), "-o", str(out), "--through-ce", "--golay-length", "64"]) == 0
        frames = read_recording(out).to_frames()
        assert len(frames) == 25
        assert all(int(np.argmax(f.magnitudes)) == 3 for f in frames)

    def test_same_seed_same_bytes(self, scenes_dir, tmp_path):
        paths = [tmp_path / "a.gtap", tmp_path / "b.gtap"]
        for path in paths:
            cli.main(["--quiet", "simulate", str(scenes_dir / "two_finger.json"), "-o", str(path)])

        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_seed_flag_overrides_scene(self, simulate):
        a = read_recording(simulate("idle"))
        b = read_recording(simulate("idle", "--seed", "42"))

        assert not np.array_equal(a.payload, b.payload)

    def test_malformed_scene_exits_2(self, tmp_path):
        scene = tmp_path / "bad.json"
        scene.write_text('{"duration_s": 1.0,')

        assert cli.main(["--quiet", "simulate", str(scene), "-o", str(tmp_path / "x.gtap")]) == 2
        assert not (tmp_path / "x.gtap").exists()

    @pytest.mark.parametrize("params", [{"speed": "fast"}, {"instability": {"rate": 3}}, {"wobble": 1}])
    def test_bad_gesture_params_exit_2(self, tmp_path, params):
        scene = tmp_path / "bad_params.json"
        scene.write_text(json.dumps({"gesture": {"kind": "slider-in", "params": params}}))

        assert cli.main(["--quiet", "simulate", str(scene), "-o", str(tmp_path / "x.gtap")]) == 2
        assert not (tmp_path / "x.gtap").exists()


class TestRun:
    def test_idle_recording_is_quiet(self, simulate, tmp_path):
        assert _run(simulate("idle"), tmp_path / "report.json") == 0
        report = RunReport.load(tmp_path / "report.json")

        assert report.summary.frames == 500
        assert report.recording.frame_count == 500
        assert report.events == []
        assert max(abs(row.level) for row in report.trace) < 2.0

    def test_two_finger_recording_fires_once(self, simulate, tmp_path, capsys):
        assert _run(simulate("two_finger"), tmp_path / "report.json") == 0
        report = RunReport.load(tmp_path / "report.json")

        assert len(report.events) == 1
        assert report.events[0].tap == 2
        assert "1 events" in capsys.readouterr().out

    def test_report_is_deterministic(self, simulate, tmp_path):
        rec = simulate("slider_in")
        _run(rec, tmp_path / "a.json")
        _run(rec, tmp_path / "b.json")

        assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()

    def test_timing_flag(self, simulate, tmp_path):
        assert cli.main(["--quiet", "run", str(simulate("idle")), "-o", str(tmp_path / "t.json"), "--timing"]) == 0

        timing = RunReport.load(tmp_path / "t.json").timing
        assert set(timing) == {"framing", "slopes", "tracker", "detector"}

    def test_config_flag(self, simulate, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text('{"tracker": {"polarity": -1}}')
        _run(simulate("slider_in"), tmp_path / "report.json", "--config", str(config))

        assert RunReport.load(tmp_path / "report.json").summary.final_level < -50.0

    def test_bonding_mismatch_exits_3(self, simulate, tmp_path):
        config = tmp_path / "cb2.json"
        PipelineConfig.from_json('{"stream": {"channel_bonding": "CB2", "n_taps": 5}}').save(config)

        assert _run(simulate("idle"), tmp_path / "report.json", "--config", str(config)) == 3
        assert not (tmp_path / "report.json").exists()

    def test_invalid_config_exits_2(self, simulate, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text('{"slopes": {"median_window": 4}}')

        assert _run(simulate("idle"), tmp_path / "report.json", "--config", str(config)) == 2

    def test_non_finite_samples_exit_4(self, tmp_path):
        frames = [TapFrame(taps=np.ones(5), timestamp=k * 0.002) for k in range(64)]
        frames[40] = TapFrame(taps=[1, np.nan, 1, 1, 1], timestamp=40 * 0.002)
        rec = write_recording(tmp_path / "nan.gtap", TapRecording.from_frames(frames, 500.0, 16))

        assert _run(rec, tmp_path / "report.json") == 4

    def test_floating_point_failure_exits_4(self, simulate, tmp_path, mocker):
        mocker.patch("gesture_radar.cli.run_pipeline", side_effect=FloatingPointError("overflow"))

        assert _run(simulate("idle"), tmp_path / "report.json") == 4


class TestCalibrateAndExport:
    def test_calibrate_writes_config(self, simulate, tmp_path):
        out = tmp_path / "calibrated.json"

        assert cli.main(["--quiet", "calibrate", str(simulate("noise")), "-o", str(out)]) == 0
        config = PipelineConfig.load(out)
        assert config.detector.spectral_threshold < PipelineConfig().detector.spectral_threshold

    def test_calibrated_config_is_quiet_on_its_own_noise(self, simulate, tmp_path):
        noise = simulate("noise")
        calibrated = tmp_path / "calibrated.json"
        cli.main(["--quiet", "calibrate", str(noise), "-o", str(calibrated)])

        assert _run(noise, tmp_path / "report.json", "--config", str(calibrated)) == 0
        assert RunReport.load(tmp_path / "report.json").summary.events == 0

    def test_margin_doubles_thresholds(self, simulate, tmp_path):
        noise = simulate("noise")
        cli.main(["--quiet", "calibrate", str(noise), "-o", str(tmp_path / "m2.json")])
        cli.main(["--quiet", "calibrate", str(noise), "-o", str(tmp_path / "m4.json"), "--margin", "4"])

        m2, m4 = PipelineConfig.load(tmp_path / "m2.json"), PipelineConfig.load(tmp_path / "m4.json")
        assert m4.detector.spectral_threshold == pytest.approx(2 * m2.detector.spectral_threshold)

    def test_calibrated_config_still_detects(self, simulate, tmp_path):
        calibrated = tmp_path / "calibrated.json"
        cli.main(["--quiet", "calibrate", str(simulate("noise")), "-o", str(calibrated)])

        assert _run(simulate("two_finger"), tmp_path / "report.json", "--config", str(calibrated)) == 0
        assert RunReport.load(tmp_path / "report.json").summary.events >= 1

    def test_export(self, simulate, tmp_path, capsys):
        _run(simulate("two_finger"), tmp_path / "report.json")

        assert cli.main(["--quiet", "export", str(tmp_path / "report.json"), "-o", str(tmp_path / "csv")]) == 0
        assert (tmp_path / "csv" / "trace.csv").read_text().count("\n") == 1 + 63
        assert (tmp_path / "csv" / "events.csv").read_text().count("\n") == 1 + 1

    def test_export_missing_report(self, tmp_path):
        assert cli.main(["--quiet", "export", str(tmp_path / "absent.json"), "-o", str(tmp_path)]) == 2


class TestParser:
    def test_requires_command(self):
        with pytest.raises(SystemExit):
            cli.main([])

    def test_scene_and_gesture_are_exclusive(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["simulate", "scene.json", "--gesture", "idle", "-o", str(tmp_path / "x.gtap")])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            cli.main(["--version"])

        assert exc_info.value.code == 0
        assert capsys.readouterr().out.strip() == f"gesture-radar {settings.PROJECT_VERSION}"

    def test_verbose_logs_banner(self, tmp_path, capsys):
        cli.main(["--verbose", "export", str(tmp_path / "absent.json"), "-o", str(tmp_path)])

        err = capsys.readouterr().err
        assert f"{settings.PROJECT_NAME} {settings.PROJECT_VERSION} ({settings.ENVIRONMENT}): export" in err
