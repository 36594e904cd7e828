"""Pydantic models shared across services."""

from ipiskit.app.schemas.generation import EndpointConfig, GenerationRecord
from ipiskit.app.schemas.normalize import NormalizedBag, Stoplist
from ipiskit.app.schemas.notation import ExpansionResult, Plain, Raw, SegmentNode, SlashPair, StarForm
from ipiskit.app.schemas.prompt import SCENARIOS, PromptBundle, SystemPromptAsset, Turn
from ipiskit.app.schemas.record import IpisRecord, SplitStats
from ipiskit.app.schemas.report import (
    BleuStats,
    EvalReport,
    InstanceScore,
    MtCell,
    MtScores,
    ProofScores,
    RunManifest,
)
from ipiskit.app.schemas.rewrite import GenreProfile, LexiconEntry, Match, Replacement, RewritePlan

__all__ = [
    "EndpointConfig",
    "GenerationRecord",
    "NormalizedBag",
    "Stoplist",
    "ExpansionResult",
    "Plain",
    "Raw",
    "SegmentNode",
    "SlashPair",
    "StarForm",
    "SCENARIOS",
    "PromptBundle",
    "SystemPromptAsset",
    "Turn",
    "IpisRecord",
    "SplitStats",
    "BleuStats",
    "EvalReport",
    "InstanceScore",
    "MtCell",
    "MtScores",
    "ProofScores",
    "RunManifest",
    "GenreProfile",
    "LexiconEntry",
    "Match",
    "Replacement",
    "RewritePlan",
]
