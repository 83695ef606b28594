from pathlib import Path

import pytest

from gesture_radar.radar.scene_sim import RadioConfig, make_gesture_scene
from gesture_radar.schemas.config import PipelineConfig
from gesture_radar.services.pipeline_service import run_pipeline

REPO_ROOT = Path(__file__).resolve().parents[2]
SCENES_DIR = REPO_ROOT / "scenes"
DEFAULT_CONFIG_FILE = REPO_ROOT / "config" / "default.json"


@pytest.fixture
def default_config() -> PipelineConfig:
    return PipelineConfig()


@pytest.fixture
def radio() -> RadioConfig:
    """CB1 radio at 20 dB per-pulse SNR"""
    return RadioConfig(noise_variance=0.01)


@pytest.fixture
def scenes_dir() -> Path:
    return SCENES_DIR


@pytest.fixture
def gesture_report():
    """Run the default pipeline over a canonical gesture scene"""

    def _run(kind, config=None, **params):
        scene = make_gesture_scene(kind, params)
        return run_pipeline(scene.simulate(), config or PipelineConfig(), seed=scene.seed)

    return _run
