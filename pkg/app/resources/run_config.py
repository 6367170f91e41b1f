"""Validated per-run configuration assembled from command-line arguments."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.resources.config import Settings, get_settings

INPUT_PATH_FIELDS = (
    "corpus",
    "financials",
    "model",
    "rules_file",
    "values_file",
    "stopwords",
    "dl_formats",
    "aliases",
    "valence_lexicon",
    "emotion_lexicon",
    "deception_lexicon",
)


class RunConfig(BaseModel):
    """Everything one subcommand needs; unset options fall back to Settings."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    command: str
    seed: int = 42
    jobs: int = Field(default=0, ge=0)
    out: Path | None = None
    format: Literal["json"] = "json"

    # Inputs
    corpus: Path | None = None
    financials: Path | None = None
    model: Path | None = None
    rules_file: Path | None = None
    values_file: Path | None = None
    stopwords: Path | None = None
    dl_formats: Path | None = None
    aliases: Path | None = None
    valence_lexicon: Path | None = None
    emotion_lexicon: Path | None = None
    deception_lexicon: Path | None = None

    # Side outputs
    model_out: Path | None = None
    findings_out: Path | None = None
    labels_out: Path | None = None
    text_out: Path | None = None
    export: Path | None = None

    # train / poi
    target: Literal["responsive", "poi"] = "responsive"
    sampler: Literal["none", "under", "over"] = "none"
    model_kind: Literal["cart", "forest", "knn"] = "cart"
    weighting: Literal["raw_count", "tfidf"] = "raw_count"
    k: int = Field(default=5, ge=1)
    n_trees: int = Field(default=100, ge=1)
    mtry: int | None = Field(default=None, ge=1)
    max_sparsity: float = Field(default=0.97, gt=0, lt=1)
    test_fraction: float = Field(default=0.3, gt=0, lt=1)
    cv_folds: int = Field(default=3, ge=2)
    min_split: int = Field(default=20, ge=2)
    min_leaf: int = Field(default=7, ge=1)
    max_depth: int = Field(default=30, ge=1)
    complexity_penalty: float = Field(default=0.01, ge=0, lt=1)
    join_mode: Literal["financial_only", "combined", "email_only"] = "combined"
    fill: Literal["zero", "median", "mean"] = "zero"

    # classify / rules
    ruleset: str | None = None
    positive_only: bool = False

    # pii
    include_contact: bool = False
    no_echo: bool = False
    keyword_window: int = Field(default=40, ge=0)
    context_width: int = Field(default=80, ge=1)

    # sentiment / benford
    bucket: Literal["week", "month"] = "month"
    series: Literal["body_length", "daily_count", "file"] = "body_length"

    @field_validator(*INPUT_PATH_FIELDS)
    @classmethod
    def _input_exists(cls, value: Path | None) -> Path | None:
        if value is not None and not value.is_file():
            raise ValueError(f"input file not found: {value}")
        return value

    @model_validator(mode="after")
    def _leaf_fits_split(self) -> "RunConfig":
        if self.min_leaf > self.min_split:
            raise ValueError(f"min_leaf ({self.min_leaf}) exceeds min_split ({self.min_split})")
        return self

    @classmethod
    def from_args(cls, args: dict, settings: Settings | None = None) -> "RunConfig":
        """Overlay parsed arguments (None = unset) on settings-derived defaults."""
        settings = settings or get_settings()
        defaults = {
            "seed": settings.seed,
            "jobs": settings.jobs,
            "stopwords": settings.stopwords_path,
            "dl_formats": settings.dl_formats_path,
            "aliases": settings.aliases_path,
            "valence_lexicon": settings.valence_lexicon_path,
            "emotion_lexicon": settings.emotion_lexicon_path,
            "deception_lexicon": settings.deception_lexicon_path,
            "max_sparsity": settings.max_sparsity,
            "test_fraction": settings.test_fraction,
            "cv_folds": settings.cv_folds,
            "n_trees": settings.n_trees,
            "keyword_window": settings.pii_keyword_window,
            "context_width": settings.pii_context_width,
        }
        given = {k: v for k, v in args.items() if v is not None}
        return cls.model_validate({**defaults, **given})

    def require(self, *fields: str) -> None:
        """Raise ValueError naming the first missing required option."""
        for name in fields:
            if getattr(self, name) is None:
                raise ValueError(f"--{name.replace('_', '-')} is required for {self.command}")
