"""Metric results, evaluation reports and run manifests."""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from ipiskit.app.schemas.record import Direction, Language, Task

Percent = Annotated[float, Field(ge=0, le=100)]


class ProofScores(BaseModel):
    """Proofreading scores over normalized bags, in percent."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["proof"] = "proof"
    accuracy: Percent
    precision: Percent
    recall: Percent
    f1: Percent
    tp: int = Field(..., ge=0, description="Predicted edits that are gold edits")
    fp: int = Field(..., ge=0, description="Predicted edits that are not gold edits")
    fn: int = Field(..., ge=0, description="Gold edits the prediction missed")
    overlap: int = Field(..., ge=0, description="|pred ∩ gold| over bags")
    union: int = Field(..., ge=0, description="|pred ∪ gold| over bags")


class MtScores(BaseModel):
    """Corpus MT metrics, in percent."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["mt"] = "mt"
    bleu: Percent
    chrf: Percent
    chrf_pp: Percent


class BleuStats(BaseModel):
    """Sufficient statistics behind a corpus BLEU score."""

    model_config = ConfigDict(frozen=True)

    matches: tuple[int, ...] = Field(..., description="Clipped n-gram matches per order")
    totals: tuple[int, ...] = Field(..., description="Hypothesis n-grams per order")
    hyp_len: int = Field(..., ge=0)
    ref_len: int = Field(..., ge=0)
    brevity_penalty: float = Field(..., ge=0, le=1)
    score: Percent


InstanceScores = Annotated[Union[ProofScores, MtScores], Field(discriminator="kind")]


class InstanceScore(BaseModel):
    """Scores of one record."""

    model_config = ConfigDict(frozen=True)

    ipis_id: str
    scores: InstanceScores
    failed_generation: bool = Field(False, description="Scored as empty output")


class MtCell(BaseModel):
    """One translation table cell: a direction and a user-prompt language."""

    model_config = ConfigDict(frozen=True)

    direction: Direction
    prompt_language: Language
    count: int = Field(..., ge=1)
    scores: MtScores


class RunManifest(BaseModel):
    """What produced a report."""

    model_config = ConfigDict(frozen=True)

    command: str
    tool_version: str
    timestamp: str
    config: dict[str, str | int | float | bool | None] = Field(default_factory=dict)


class EvalReport(BaseModel):
    """Per-instance and corpus scores for one scenario."""

    model_config = ConfigDict(frozen=True)

    task: Task
    scenario: str
    manifest: RunManifest
    per_instance: tuple[InstanceScore, ...] = ()
    proof: ProofScores | None = Field(None, description="Micro-aggregated proofreading scores")
    mt: MtScores | None = Field(None, description="Corpus MT metrics over all instances")
    cells: tuple[MtCell, ...] = Field((), description="Translation cells by direction and prompt language")
    warnings: tuple[str, ...] = ()
