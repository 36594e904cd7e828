"""Pytest configuration and fixtures."""

import logging
from typing import AsyncGenerator

import httpx
import pytest

from ipiskit.app.api.stub import create_stub_app
from ipiskit.app.core.config import ASSETS_DIR
from ipiskit.app.schemas.generation import EndpointConfig
from ipiskit.app.schemas.record import IpisRecord
from ipiskit.app.services.normalize import default_stoplist
from ipiskit.app.services.rewriter import Lexicon, load_genres
from ipiskit.tests.helpers import PROOFREADING_PROMPT


@pytest.fixture(autouse=True)
def restore_logging():
    """CLI commands reconfigure the root logger; put it back after each test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture(scope="session")
def stoplist():
    """Bundled Polish stoplist."""
    return default_stoplist()


@pytest.fixture(scope="session")
def lexicon() -> Lexicon:
    """Bundled rewriter lexicon."""
    return Lexicon.load(ASSETS_DIR / "lexicon_pl.tsv")


@pytest.fixture(scope="session")
def genres():
    """Bundled genre profiles."""
    return load_genres(ASSETS_DIR / "genres.json")


@pytest.fixture
def proofreading_record() -> IpisRecord:
    """The jury proofreading instance from the published dev split."""
    return IpisRecord(
        source_resource_id="nlprepl-nkjp1m-dev",
        ipis_id="IPIS_proofreading_dev_2143",
        prompt=PROOFREADING_PROMPT,
        source=(
            "W 24-osobowym składzie sędziowskim znalazło się 8 Polaków, pianistów i pedagogów. "
            "W przypadku własnych uczniów nie będą mieli prawa głosu. Pojawią się też m.in. "
            "laureat nagrody za najlepsze nagranie Roku Chopinowskiego - Emanuel Ax i rosyjska "
            "pianistka reprezentująca USA - Bella Davidovich."
        ),
        target=(
            "W 24-osobowym składzie sędziowskim znalazło się 8 Pol*aków/ek, pianist*ów/ek i "
            "pedago*gów/żek. W przypadku własnych ucz*niów/ennic nie będą mi*eli/ały prawa głosu. "
            "Pojawią się też m.in. laureat nagrody za najlepsze nagranie Roku Chopinowskiego - "
            "Emanuel Ax i rosyjska pianistka reprezentująca USA - Bella Davidovich."
        ),
    )


@pytest.fixture
def translation_record() -> IpisRecord:
    """A pl2en translation instance with an English user prompt."""
    return IpisRecord(
        source_resource_id="EU_Karta_Praw_Podstawowych",
        ipis_id="IPIS-EN_translation_pl2en_dev_39",
        prompt="Generate an English translation of the text:",
        source=(
            "Pracownikom/Pracownicom i ich przedstawicielom/przedstawicielkom należy zagwarantować "
            "informację i konsultację we właściwym czasie."
        ),
        target=(
            "Workers or their representatives must be guaranteed information and consultation "
            "in good time."
        ),
        prompt_language="EN",
        source_language="PL",
        target_language="EN",
    )


@pytest.fixture
def endpoint_config() -> EndpointConfig:
    """Endpoint config pointing at the in-process stub."""
    return EndpointConfig(
        base_url="http://stub/v1",
        model_id="stub-model",
        max_retries=3,
        parallelism=3,
        backoff_base=0.0,
        backoff_max=0.0,
        timeout=5.0,
    )


@pytest.fixture
def stub_app():
    """Echo stub without injected failures."""
    return create_stub_app()


@pytest.fixture
async def stub_client(stub_app) -> AsyncGenerator[httpx.AsyncClient, None]:
    """HTTP client wired to the echo stub via ASGI."""
    transport = httpx.ASGITransport(app=stub_app)
    async with httpx.AsyncClient(transport=transport, base_url="http://stub") as client:
        yield client
