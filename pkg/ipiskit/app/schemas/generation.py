"""Endpoint configuration and generation results."""

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ipiskit.app.core.config import Settings


class EndpointConfig(BaseModel):
    """Chat-completion endpoint and decoding parameters."""

    model_config = ConfigDict(frozen=True)

    base_url: str
    model_id: str
    temperature: float = Field(0.0, ge=0, le=2)
    max_output_tokens: int = Field(1024, gt=0)
    timeout: float = Field(60.0, gt=0, description="Seconds per request")
    max_retries: int = Field(3, ge=0, description="Retries after the first attempt")
    parallelism: int = Field(4, ge=1, description="Maximum requests in flight")
    backoff_base: float = Field(0.5, ge=0)
    backoff_max: float = Field(8.0, ge=0)
    api_key: str | None = Field(None, repr=False)

    @field_validator("base_url")
    @classmethod
    def strip_trailing_slash(cls, v: str) -> str:
        return v.rstrip("/")

    @property
    def completions_url(self) -> str:
        return f"{self.base_url}/chat/completions"

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "EndpointConfig":
        """Build from toolkit settings; keyword overrides that are None are ignored."""
        values = {
            "base_url": settings.base_url,
            "model_id": settings.model_id,
            "temperature": settings.temperature,
            "max_output_tokens": settings.max_output_tokens,
            "timeout": settings.timeout,
            "max_retries": settings.max_retries,
            "parallelism": settings.parallelism,
            "backoff_base": settings.backoff_base,
            "backoff_max": settings.backoff_max,
            "api_key": settings.api_key,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class GenerationRecord(BaseModel):
    """Outcome of one request; exactly one of output and error is set."""

    model_config = ConfigDict(frozen=True)

    ipis_id: str
    scenario: str
    output: str | None = None
    latency_ms: float = Field(0.0, ge=0)
    attempts: int = Field(1, ge=0)
    error: str | None = None

    @model_validator(mode="after")
    def check_outcome(self) -> "GenerationRecord":
        if (self.output is None) == (self.error is None):
            raise ValueError("exactly one of output and error must be set")
        return self

    @property
    def ok(self) -> bool:
        return self.error is None
