from pydantic_settings import BaseSettings
from typing import Optional
import os
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    PROJECT_NAME: str = "60 GHz Gesture Radar"
    PROJECT_VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = os.getenv("LOG_FILE")

    # Reproducibility
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))

    # Pipeline config shipped with the repo; overridden by --config
    DEFAULT_CONFIG_PATH: str = os.getenv(
        "DEFAULT_CONFIG_PATH",
        os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "config", "default.json"),
    )

    # Environment
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")

    class Config:
        case_sensitive = True
        env_file = ".env"
        extra = "ignore"  # Ignore extra fields from .env

    @property
    def default_config_exists(self) -> bool:
        """Whether the shipped pipeline config is present on disk"""
        return os.path.isfile(self.DEFAULT_CONFIG_PATH)

settings = Settings()
