"""Parsed units of Polish gender-inclusive notation."""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field


class Plain(BaseModel):
    """A word without inclusive notation (also dates, paths and fractions)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["plain"] = "plain"
    word: str = Field(..., description="Surface word, case preserved")


class StarForm(BaseModel):
    """Root + ``*`` + masculine/feminine suffixes, e.g. ``pracowni*ków/czek``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["star"] = "star"
    root: str = Field(..., min_length=1, description="Shared part of both forms")
    masc_suffix: str = Field("", description="Masculine suffix, possibly empty")
    fem_suffix: str = Field(..., min_length=1, description="Feminine suffix")


class SlashPair(BaseModel):
    """Two full word forms joined by ``/``, e.g. ``student/studentka``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["slash"] = "slash"
    left: str = Field(..., min_length=1, description="Form before the slash")
    right: str = Field(..., min_length=1, description="Form after the slash")


class Raw(BaseModel):
    """A token whose notation could not be parsed; kept verbatim."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["raw"] = "raw"
    text: str = Field(..., description="Original token text")
    reason: str = Field(..., description="Why the token is unparseable")


SegmentNode = Annotated[Union[Plain, StarForm, SlashPair, Raw], Field(discriminator="kind")]


class ExpansionResult(BaseModel):
    """Full masculine and feminine words produced by a two-form node."""

    model_config = ConfigDict(frozen=True)

    masculine: str
    feminine: str
    origin: StarForm | SlashPair
