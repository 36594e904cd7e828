"""
Chat prompt assembly for the evaluation scenarios.

A scenario is a model setup (default, fewshot, tuned) optionally combined
with a Polish or English system prompt (``-pl`` / ``-en``). The user turn is
always the record's own prompt followed by its source text.
"""

import logging
import random
from collections.abc import Sequence
from pathlib import Path

from ipiskit.app.core.config import ASSETS_DIR, settings
from ipiskit.app.core.exceptions import PromptBuildError
from ipiskit.app.schemas.prompt import SCENARIOS, PromptBundle, SystemPromptAsset, Turn
from ipiskit.app.schemas.record import IpisRecord, Language, Task

logger = logging.getLogger(__name__)

BUNDLED_PROMPT_DIR = ASSETS_DIR / "system_prompts"
DEFAULT_FEWSHOT_K = 3
DEFAULT_SEED = 13


def system_language(scenario: str) -> Language | None:
    """System prompt language selected by a scenario suffix."""
    if scenario.endswith("-pl"):
        return "PL"
    if scenario.endswith("-en"):
        return "EN"
    return None


def is_fewshot(scenario: str) -> bool:
    return scenario.split("-", 1)[0] == "fewshot"


def user_text(record: IpisRecord) -> str:
    """Record prompt and source joined by one space."""
    return f"{record.prompt.rstrip()} {record.source}"


class SystemPromptLibrary:
    """
    System prompt texts per (task, language).

    English texts are bundled. Polish texts are read from ``pl_dir``
    (``proofreading_pl.txt``, ``translation_pl.txt``) when one is configured.
    """

    def __init__(self, pl_dir: str | Path | None = None, en_dir: str | Path = BUNDLED_PROMPT_DIR):
        self.pl_dir = Path(pl_dir) if pl_dir else None
        self.en_dir = Path(en_dir)
        self._cache: dict[tuple[str, str], SystemPromptAsset] = {}

    def _path(self, task: Task, language: Language) -> Path | None:
        directory = self.en_dir if language == "EN" else self.pl_dir
        if directory is None:
            return None
        return directory / f"{task}_{language.lower()}.txt"

    def get(self, task: Task, language: Language) -> SystemPromptAsset:
        """
        Load one asset.

        Raises:
            PromptBuildError: If the asset file is not available
        """
        key = (task, language)
        if key in self._cache:
            return self._cache[key]

        path = self._path(task, language)
        if path is None or not path.is_file():
            hint = " (set IPIS_SYSTEM_PROMPT_DIR)" if language == "PL" else ""
            raise PromptBuildError(f"no {language} system prompt for {task}{hint}")

        asset = SystemPromptAsset(task=task, language=language, text=path.read_text(encoding="utf-8").strip())
        self._cache[key] = asset
        logger.debug(f"[PROMPTS] Loaded {language} {task} system prompt from {path}")
        return asset


_default_library: SystemPromptLibrary | None = None


def default_library() -> SystemPromptLibrary:
    """Library over the bundled assets and the configured Polish directory."""
    global _default_library
    if _default_library is None:
        _default_library = SystemPromptLibrary(pl_dir=settings.system_prompt_dir)
    return _default_library


def _sample_exemplars(
    record: IpisRecord,
    pool: Sequence[IpisRecord],
    k: int,
    seed: int,
) -> list[IpisRecord]:
    candidates = sorted(
        (item for item in pool if item.ipis_id != record.ipis_id and item.task == record.task),
        key=lambda item: item.ipis_id,
    )
    if k < 1:
        raise PromptBuildError(f"fewshot scenarios need k >= 1, got {k}", record.ipis_id)
    if k > len(candidates):
        raise PromptBuildError(f"k={k} exceeds the {len(candidates)} usable exemplars", record.ipis_id)
    rng = random.Random(f"{seed}:{record.ipis_id}")
    return rng.sample(candidates, k)


def build(
    record: IpisRecord,
    scenario: str,
    fewshot_pool: Sequence[IpisRecord] = (),
    k: int = DEFAULT_FEWSHOT_K,
    seed: int = DEFAULT_SEED,
    library: SystemPromptLibrary | None = None,
    system_asset: SystemPromptAsset | None = None,
) -> PromptBundle:
    """
    Assemble the chat messages for one record.

    Args:
        record: Record to prompt for
        scenario: One of the nine scenario labels
        fewshot_pool: Exemplar records (normally the train split)
        k: Exemplars for fewshot scenarios; ignored otherwise
        seed: Sampling seed; exemplars depend only on (seed, record id, pool)
        library: System prompt source (bundled/configured assets by default)
        system_asset: Explicit system prompt, overriding the library

    Returns:
        PromptBundle whose last turn is the record's prompt and source

    Raises:
        PromptBuildError: On an unknown scenario, k larger than the pool,
            a missing asset, or an asset for the other task
    """
    if scenario not in SCENARIOS:
        raise PromptBuildError(f"unknown scenario {scenario!r}", record.ipis_id)

    system = None
    language = system_language(scenario)
    if system_asset is not None:
        if system_asset.task != record.task:
            raise PromptBuildError(
                f"{system_asset.task} system prompt used for a {record.task} record", record.ipis_id
            )
        system = system_asset.text
    elif language is not None:
        system = (library or default_library()).get(record.task, language).text

    turns: list[Turn] = []
    if is_fewshot(scenario):
        for exemplar in _sample_exemplars(record, fewshot_pool, k, seed):
            turns.append(Turn(role="user", text=user_text(exemplar)))
            turns.append(Turn(role="assistant", text=exemplar.target))
    turns.append(Turn(role="user", text=user_text(record)))

    return PromptBundle(ipis_id=record.ipis_id, scenario=scenario, system=system, turns=tuple(turns))


def build_all(
    records: Sequence[IpisRecord],
    scenario: str,
    fewshot_pool: Sequence[IpisRecord] = (),
    k: int = DEFAULT_FEWSHOT_K,
    seed: int = DEFAULT_SEED,
    library: SystemPromptLibrary | None = None,
) -> list[PromptBundle]:
    """Bundles for every record, in input order."""
    bundles = [build(record, scenario, fewshot_pool, k, seed, library) for record in records]
    logger.info(f"[PROMPTS] Built {len(bundles)} bundles for scenario {scenario}")
    return bundles
