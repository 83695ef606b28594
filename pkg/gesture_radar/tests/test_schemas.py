import json

import pytest

from gesture_radar.exceptions import SchemaError
from gesture_radar.radar.framing import ChannelBonding
from gesture_radar.radar.scene_sim import make_gesture_scene
from gesture_radar.schemas.config import PipelineConfig, TapStrategy
from gesture_radar.schemas.report import RunReport
from gesture_radar.schemas.scene import SceneFile
from gesture_radar.tests.conftest import DEFAULT_CONFIG_FILE


class TestPipelineConfig:
    def test_shipped_default_matches_builtin(self):
        assert PipelineConfig.load(DEFAULT_CONFIG_FILE) == PipelineConfig()

    def test_save_and_load(self, tmp_path):
        config = PipelineConfig.from_json('{"tracker": {"tap_strategy": "max-slope", "polarity": -1}}')
        config.save(tmp_path / "cfg.json")
        loaded = PipelineConfig.load(tmp_path / "cfg.json")

        assert loaded.tracker.tap_strategy is TapStrategy.MAX_SLOPE
        assert loaded == config

    def test_invalid_json_reports_position(self):
        with pytest.raises(SchemaError) as exc:
            PipelineConfig.from_json('{"slopes": {"n_per_fit": 8,,}}', source="cfg.json")

        assert exc.value.exit_code == 2
        assert "line 1, column" in exc.value.details[0]

    @pytest.mark.parametrize("doc,path", [
        ({"slopes": {"median_window": 4}}, "slopes.median_window"),
        ({"slopes": {"n_per_fit": 3}}, "slopes.n_per_fit"),
        ({"detector": {"vote_k": 2}}, "detector.vote_k"),
        ({"tracker": {"polarity": 0}}, "tracker.polarity"),
        ({"stream": {"sample_rate_hz": 200}}, "stream.sample_rate_hz"),
        ({"stream": {"channel_bonding": "CB9"}}, "stream.channel_bonding"),
        ({"bogus": 1}, "bogus"),
    ])
    def test_field_paths_in_errors(self, doc, path):
        with pytest.raises(SchemaError) as exc:
            PipelineConfig.from_json(json.dumps(doc))

        assert any(d.startswith(path) for d in exc.value.details)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            PipelineConfig.load(tmp_path / "absent.json")

    def test_stream_defaults_follow_bonding(self):
        stream = PipelineConfig.from_json('{"stream": {"channel_bonding": "CB2"}}').stream

        assert stream.resolved_n_taps == ChannelBonding.CB2.taps_of_interest
        assert stream.resolved_tap_spacing == ChannelBonding.CB2.tap_spacing


class TestSceneFile:
    def test_shipped_scenes_load(self, scenes_dir):
        for path in sorted(scenes_dir.glob("*.json")):
            scene = SceneFile.load(path).to_scene()
            assert scene.duration > 0
            assert scene.radio.noise_variance == 0.01

    def test_gesture_scene_matches_simulator(self, scenes_dir):
        scene_file = SceneFile.load(scenes_dir / "two_finger.json")
        from_file = scene_file.to_scene()
        direct = make_gesture_scene("two-finger", {"speed": 0.05, "seed": 4})

        assert from_file.targets == direct.targets
        assert from_file.seed == 4

    def test_explicit_seed_wins(self, scenes_dir):
        assert SceneFile.load(scenes_dir / "idle.json").to_scene(seed=99).seed == 99

    def test_explicit_targets(self):
        doc = {
            "duration_s": 0.5,
            "background_amplitude": 0.2,
            "targets": [{"keyframes": [[0.0, 0.1], [0.5, 0.12]], "amplitude": 0.8, "label": "hand"}],
        }
        scene = SceneFile.from_json(json.dumps(doc)).to_scene()

        assert len(scene.targets) == 5 + 1
        assert scene.targets[-1].keyframes == ((0.0, 0.1), (0.5, 0.12))

    def test_from_scene_describes_same_targets(self):
        scene = make_gesture_scene("swipe", {"seed": 2})
        rebuilt = SceneFile.from_json(SceneFile.from_scene(scene).to_json()).to_scene()

        assert rebuilt.targets == scene.targets
        assert rebuilt.seed == 2

    @pytest.mark.parametrize("doc", [
        {"targets": [{"keyframes": [[0.2, 0.1], [0.1, 0.1]]}]},
        {"targets": [{"keyframes": [[0.0, -0.1]]}]},
        {"gesture": {"kind": "wave"}},
        {"gesture": {"kind": "idle", "params": {"seed": 3}}},
        {"gesture": {"kind": "slider-in", "params": {"speed": "fast"}}},
        {"gesture": {"kind": "slider-in", "params": {"instability": {"rate": 3}}}},
        {"radio": {"packet_rate_hz": 2000}},
        {"duration_s": 0},
    ])
    def test_schema_violations(self, doc):
        with pytest.raises(SchemaError):
            SceneFile.from_json(json.dumps(doc))

    def test_gesture_params_are_typed(self):
        doc = {"gesture": {"kind": "slider-in", "params": {"speed": "0.1", "instability": {"event_rate": 5}}}}
        params = SceneFile.from_json(json.dumps(doc)).gesture.params

        assert params.to_params() == {
            "speed": 0.1,
            "instability": {"event_rate": 5.0, "phase_jitter_scale": 0.0, "gain_jitter_scale": 0.0},
        }

    def test_schema_error_names_the_param(self):
        doc = {"gesture": {"kind": "slider-in", "params": {"speed": "fast"}}}

        with pytest.raises(SchemaError) as exc_info:
            SceneFile.from_json(json.dumps(doc))
        assert any(line.startswith("gesture.params.speed") for line in exc_info.value.details)

    def test_physically_invalid_gesture(self):
        scene_file = SceneFile.from_json('{"gesture": {"kind": "slider-in", "params": {"speed": 1.5}}}')

        with pytest.raises(SchemaError):
            scene_file.to_scene()


class TestRunReport:
    def test_json_round_trip(self, gesture_report, tmp_path):
        report = gesture_report("two-finger", seed=4)
        report.save(tmp_path / "report.json")

        assert RunReport.load(tmp_path / "report.json") == report

    def test_timing_omitted_unless_recorded(self, gesture_report):
        assert "timing" not in json.loads(gesture_report("idle", duration=0.2).to_json())
