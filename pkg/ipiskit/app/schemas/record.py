"""IPIS instruction records and split statistics."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Language = Literal["PL", "EN"]
Task = Literal["proofreading", "translation"]
Split = Literal["train", "dev", "test"]
Direction = Literal["pl2en", "en2pl"]

LANGUAGE_FIELDS = ("prompt_language", "source_language", "target_language")


class IpisRecord(BaseModel):
    """
    One instruction instance.

    Translation records carry all three language fields, proofreading
    records carry none. Unknown fields are kept so a record serializes back
    unchanged.
    """

    model_config = ConfigDict(frozen=True, extra="allow")

    source_resource_id: str
    ipis_id: str = Field(..., min_length=1)
    prompt: str
    source: str
    target: str
    prompt_language: Language | None = None
    source_language: Language | None = None
    target_language: Language | None = None

    @model_validator(mode="after")
    def check_language_fields(self) -> "IpisRecord":
        present = [getattr(self, name) is not None for name in LANGUAGE_FIELDS]
        if any(present) and not all(present):
            missing = [name for name, ok in zip(LANGUAGE_FIELDS, present) if not ok]
            raise ValueError(f"translation record is missing {', '.join(missing)}")
        if all(present) and self.source_language == self.target_language:
            raise ValueError("source_language and target_language must differ")
        return self

    @property
    def task(self) -> Task:
        return "translation" if self.source_language is not None else "proofreading"

    @property
    def direction(self) -> Direction | None:
        if self.source_language is None:
            return None
        return "pl2en" if self.source_language == "PL" else "en2pl"


class SplitStats(BaseModel):
    """Record count of one task/split pair."""

    model_config = ConfigDict(frozen=True)

    task: Task
    split: Split | None = Field(None, description="None when the split cannot be inferred")
    count: int = Field(..., ge=0)
