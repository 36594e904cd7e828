"""Toolkit configuration."""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

ASSETS_DIR = Path(__file__).resolve().parent.parent / "assets"


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables (prefix ``IPIS_``)."""

    model_config = SettingsConfigDict(
        env_prefix="IPIS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Chat-completion endpoint
    api_key: str | None = Field(default=None, description="Bearer token sent to the endpoint")
    base_url: str = Field(
        default="http://127.0.0.1:8765/v1",
        description="Endpoint base URL; /chat/completions is appended"
    )
    model_id: str = Field(default="bielik-11b", description="Model name sent in each request")
    temperature: float = Field(default=0.0, description="Sampling temperature (0 = reproducible)")
    max_output_tokens: int = Field(default=1024, description="max_tokens sent in each request")
    timeout: float = Field(default=60.0, description="Per-request timeout in seconds")
    max_retries: int = Field(default=3, description="Retries after the first attempt")
    parallelism: int = Field(default=4, description="Maximum requests in flight")
    backoff_base: float = Field(default=0.5, description="First retry delay in seconds")
    backoff_max: float = Field(default=8.0, description="Upper bound for a retry delay")

    # Resources (None = bundled asset)
    stoplist_path: Path | None = Field(default=None, description="Stoplist file override")
    lexicon_path: Path | None = Field(default=None, description="Rewriter lexicon TSV override")
    genres_path: Path | None = Field(default=None, description="Genre profile JSON override")
    system_prompt_dir: Path | None = Field(
        default=None,
        description="Directory holding proofreading_pl.txt / translation_pl.txt"
    )

    # Prompt assembly
    fewshot_k: int = Field(default=3, description="Exemplars per few-shot bundle")
    seed: int = Field(default=13, description="Seed for exemplar sampling")

    # Rewriter
    coordination_order: str = Field(
        default="masc-first",
        description="Order of doubled nouns: masc-first or fem-first"
    )
    default_genre: str = Field(default="press", description="Genre profile used when none is given")

    # Metrics
    bleu_lowercase: bool = Field(default=False, description="Lowercase before BLEU/chrF")

    log_level: str = Field(default="INFO", description="Log level")

    @property
    def resolved_stoplist_path(self) -> Path:
        return self.stoplist_path or ASSETS_DIR / "stoplist_pl.txt"

    @property
    def resolved_lexicon_path(self) -> Path:
        return self.lexicon_path or ASSETS_DIR / "lexicon_pl.tsv"

    @property
    def resolved_genres_path(self) -> Path:
        return self.genres_path or ASSETS_DIR / "genres.json"

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is valid."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v_upper

    @field_validator("parallelism", "max_output_tokens", "fewshot_k")
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        """Validate integer is positive."""
        if v <= 0:
            raise ValueError(f"Value must be positive, got {v}")
        return v

    @field_validator("max_retries")
    @classmethod
    def validate_max_retries(cls, v: int) -> int:
        if v < 0:
            raise ValueError("max_retries must not be negative")
        return v

    @field_validator("timeout")
    @classmethod
    def validate_timeout(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("timeout must be positive")
        return v

    @field_validator("backoff_base", "backoff_max")
    @classmethod
    def validate_backoff(cls, v: float) -> float:
        if v < 0:
            raise ValueError("backoff delays must not be negative")
        return v

    @field_validator("temperature")
    @classmethod
    def validate_temperature(cls, v: float) -> float:
        """Validate temperature is within the usual chat-completion range."""
        if not 0 <= v <= 2:
            raise ValueError("temperature must be between 0 and 2")
        return v

    @field_validator("coordination_order")
    @classmethod
    def validate_coordination_order(cls, v: str) -> str:
        if v not in ("masc-first", "fem-first"):
            raise ValueError("coordination_order must be masc-first or fem-first")
        return v


# Reference only: the instruction-tuning setup these evaluations were designed
# around. Nothing in the toolkit trains models.
TRAINING_REFERENCE: dict[str, str | int | float] = {
    "attention_implementation": "flash_attention_2",
    "lora_rank": 128,
    "lora_alpha": 256,
    "lora_dropout": 0.05,
    "num_train_epochs": 3,
    "per_device_train_batch_size": 2,
    "per_device_eval_batch_size": 2,
    "gradient_accumulation_steps": 4,
    "learning_rate": 2e-5,
    "weight_decay": 1e-3,
    "adam_beta1": 0.999,
    "adam_beta2": 0.9,
    "warmup_ratio": 0.05,
    "lr_scheduler_type": "cosine",
    "max_seq_length": 4096,
}

# Global settings instance
settings = Settings()
