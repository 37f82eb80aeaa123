# src/core/config.py
from pathlib import Path
import logging

from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

REPO_ROOT = Path(__file__).resolve().parents[2]


class Settings(BaseSettings):
    # Application
    app_name: str = "KoszulScope"
    version: str = "1.0.0"
    log_level: str = "WARNING"

    # Plain-text surface models (KOSZULSCOPE_MODEL_DIR)
    model_dir: Path = REPO_ROOT / "models"

    # Run limits
    d_cap: int = 200
    uniqueness_window: int = 48
    uniqueness_search_limit: int = 200
    fit_min_run: int = 4
    max_workers: int = 4

    # Oracle
    oracle_fallback: bool = True
    smoothness_samples: int = 100
    smoothness_prime: int = 13
    smoothness_seed: int = 1729

    model_config = SettingsConfigDict(
        env_prefix="KOSZULSCOPE_",
        env_file=".env",
        case_sensitive=False,
    )

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        model_status = "✅ Found" if self.model_dir.is_dir() else "❌ Missing"
        logger.debug(f"📂 Model directory {self.model_dir}: {model_status}")


settings = Settings()
