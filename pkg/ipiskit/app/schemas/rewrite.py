"""Lexicon entries, genre profiles and rewrite plans for the baseline rewriter."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Category = Literal["noun", "adjective", "verb", "pronoun", "numeral"]
Strategy = Literal["coordination", "slash", "star", "osoba", "neutral"]


class LexiconEntry(BaseModel):
    """A generic-masculine surface form and its feminine counterpart."""

    model_config = ConfigDict(frozen=True)

    masc_form: str = Field(..., min_length=1)
    fem_form: str = Field(..., min_length=1)
    star_form: str | None = Field(None, description="None when no star notation exists")
    category: Category
    case_tag: str = ""
    osoba_form: str | None = None
    neutral_form: str | None = None

    @property
    def is_phrase(self) -> bool:
        return " " in self.masc_form

    @property
    def key(self) -> str:
        return self.masc_form.casefold()


class GenreProfile(BaseModel):
    """Inclusive strategies permitted for a genre, in order of preference."""

    model_config = ConfigDict(frozen=True)

    genre: str
    strategies: tuple[Strategy, ...] = Field(..., min_length=1)

    @field_validator("strategies")
    @classmethod
    def reject_duplicates(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if len(set(v)) != len(v):
            raise ValueError("strategies must not repeat")
        return v

    def allows(self, strategy: str) -> bool:
        return strategy in self.strategies


class Match(BaseModel):
    """A detected exclusionary expression."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=0)
    end: int
    surface: str = Field(..., description="Matched source text, original case")
    entry: LexiconEntry


class Replacement(BaseModel):
    """One applied substitution."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=0, description="Span start in the source text")
    end: int = Field(..., description="Span end in the source text")
    replacement: str
    entry: LexiconEntry
    strategy: Strategy


class RewritePlan(BaseModel):
    """Source text plus the ordered, non-overlapping replacements applied to it."""

    model_config = ConfigDict(frozen=True)

    source: str
    genre: str
    replacements: tuple[Replacement, ...] = ()

    @model_validator(mode="after")
    def check_spans(self) -> "RewritePlan":
        previous_end = 0
        for item in self.replacements:
            if item.start < previous_end or item.end <= item.start:
                raise ValueError("replacement spans must be non-overlapping and increasing")
            if self.source[item.start:item.end].casefold() != item.entry.key:
                raise ValueError(f"span {item.start}:{item.end} does not match {item.entry.masc_form!r}")
            previous_end = item.end
        return self

    def __len__(self) -> int:
        return len(self.replacements)

    def apply(self) -> str:
        """Rewritten text."""
        pieces = []
        cursor = 0
        for item in self.replacements:
            pieces.append(self.source[cursor:item.start])
            pieces.append(item.replacement)
            cursor = item.end
        pieces.append(self.source[cursor:])
        return "".join(pieces)
