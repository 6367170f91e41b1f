"""Configuration settings loaded from environment variables."""

from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings

DATA_DIR = Path(__file__).parent / "data"


class Settings(BaseSettings):
    """Application settings from environment variables."""

    # Reproducibility
    seed: int = 42

    # Corpus scanning (0 = all available cores)
    jobs: int = 0
    shard_size: int = 5000

    # Logging
    log_level: str = "INFO"

    # External input files (None = built-in fixture data)
    stopwords_path: Path | None = None
    dl_formats_path: Path | None = None
    aliases_path: Path | None = None
    valence_lexicon_path: Path | None = None
    emotion_lexicon_path: Path | None = None
    deception_lexicon_path: Path | None = None

    # Predictive coding
    max_sparsity: float = 0.97
    test_fraction: float = 0.3
    cv_folds: int = 3
    n_trees: int = 100

    # PII scanning
    pii_context_width: int = 80
    pii_keyword_window: int = 40

    model_config = {
        "env_prefix": "MAILFORENSICS_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
    }


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
