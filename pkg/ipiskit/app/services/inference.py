"""
Chat-completion client for collecting model outputs.

Speaks the messages-array / choices-array JSON protocol over httpx. Batches
keep input order, bound the number of requests in flight and never abort on
a failed record.
"""

import asyncio
import json
import logging
import random
import time
from collections.abc import Awaitable, Callable, Sequence
from pathlib import Path

import httpx
from pydantic import ValidationError

from ipiskit.app.core.exceptions import InferenceError
from ipiskit.app.schemas.generation import EndpointConfig, GenerationRecord
from ipiskit.app.schemas.prompt import PromptBundle

logger = logging.getLogger(__name__)

CacheKey = tuple[str, str]


def is_retryable(status: int) -> bool:
    """Rate limits and server errors are worth another attempt."""
    return status == 429 or status >= 500


class GenerationCache:
    """
    Append-only JSONL of GenerationRecords.

    A resumed run skips (ipis_id, scenario) pairs that already succeeded.
    When a pair occurs more than once, the last line wins.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load(self) -> dict[CacheKey, GenerationRecord]:
        records: dict[CacheKey, GenerationRecord] = {}
        if not self.path.exists():
            return records
        with open(self.path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = GenerationRecord.model_validate_json(line)
                except ValidationError:
                    # A run killed mid-write leaves a partial last line.
                    logger.warning(f"[BATCH] Ignoring unreadable cache line {self.path}:{lineno}")
                    continue
                records[(record.ipis_id, record.scenario)] = record
        return records

    def completed(self) -> dict[CacheKey, GenerationRecord]:
        """Successful records only."""
        return {key: record for key, record in self.load().items() if record.ok}

    def append(self, record: GenerationRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(record.model_dump_json() + "\n")
            f.flush()


class InferenceClient:
    """
    Client for one chat-completion endpoint.

    Examples:
        >>> client = InferenceClient(cfg)
        >>> record = await client.generate(bundle)
        >>> records = await client.generate_batch(bundles, cache=GenerationCache("preds.jsonl"))
    """

    def __init__(
        self,
        cfg: EndpointConfig,
        transport: httpx.AsyncBaseTransport | None = None,
        sleep: Callable[[float], Awaitable[None]] = asyncio.sleep,
        rng: random.Random | None = None,
    ):
        """
        Initialize client.

        Args:
            cfg: Endpoint and decoding parameters
            transport: Custom httpx transport (e.g. ASGITransport for the stub)
            sleep: Coroutine used between retries
            rng: Source of backoff jitter
        """
        self.cfg = cfg
        self.transport = transport
        self._sleep = sleep
        self._rng = rng or random.Random()

    def _client(self) -> httpx.AsyncClient:
        return httpx.AsyncClient(transport=self.transport, timeout=self.cfg.timeout)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.cfg.api_key:
            headers["Authorization"] = f"Bearer {self.cfg.api_key}"
        return headers

    def request_body(self, bundle: PromptBundle) -> dict:
        return {
            "model": self.cfg.model_id,
            "messages": bundle.to_messages(),
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_output_tokens,
        }

    def backoff(self, attempt: int) -> float:
        """Delay before retry number ``attempt`` (1-based), with jitter."""
        delay = min(self.cfg.backoff_max, self.cfg.backoff_base * 2 ** (attempt - 1))
        return min(self.cfg.backoff_max, delay + self._rng.uniform(0, delay / 2))

    async def _generate(self, client: httpx.AsyncClient, bundle: PromptBundle) -> GenerationRecord:
        body = self.request_body(bundle)
        start_time = time.perf_counter()
        attempts = 0

        logger.info(f"[LLM REQUEST] {bundle.ipis_id} scenario={bundle.scenario} model={self.cfg.model_id}")
        logger.debug(f"[LLM REQUEST] User prompt: {bundle.user_text[:200]}...")

        while True:
            attempts += 1
            status = None
            try:
                response = await client.post(self.cfg.completions_url, headers=self._headers(), json=body)
            except httpx.TransportError as e:
                reason = f"{type(e).__name__}: {e}"
                retryable = True
            else:
                status = response.status_code
                if response.is_success:
                    try:
                        output = response.json()["choices"][0]["message"]["content"]
                        if not isinstance(output, str):
                            raise TypeError(f"content is {type(output).__name__}, not a string")
                    except (ValueError, KeyError, IndexError, TypeError) as e:
                        reason = f"malformed response: {e!r}"
                        retryable = False
                    else:
                        elapsed_ms = (time.perf_counter() - start_time) * 1000
                        logger.info(f"[LLM RESPONSE] {bundle.ipis_id} Time: {elapsed_ms:.0f}ms attempts={attempts}")
                        logger.debug(f"[LLM RESPONSE] Result: {output[:200]}...")
                        return GenerationRecord(
                            ipis_id=bundle.ipis_id,
                            scenario=bundle.scenario,
                            output=output,
                            latency_ms=elapsed_ms,
                            attempts=attempts,
                        )
                else:
                    reason = response.text[:200] or response.reason_phrase
                    retryable = is_retryable(status)

            if not retryable or attempts > self.cfg.max_retries:
                error = InferenceError(reason, status=status, attempts=attempts)
                logger.warning(f"[LLM RESPONSE] {bundle.ipis_id} failed: {error.message}")
                return GenerationRecord(
                    ipis_id=bundle.ipis_id,
                    scenario=bundle.scenario,
                    error=error.message,
                    latency_ms=(time.perf_counter() - start_time) * 1000,
                    attempts=attempts,
                )

            delay = self.backoff(attempts)
            logger.info(f"[LLM REQUEST] {bundle.ipis_id} retry {attempts} in {delay:.2f}s ({reason[:80]})")
            await self._sleep(delay)

    async def generate(self, bundle: PromptBundle) -> GenerationRecord:
        """
        Generate one output.

        Returns:
            GenerationRecord with the first choice's text, or an error record
            after a non-retryable status or exhausted retries
        """
        async with self._client() as client:
            return await self._generate(client, bundle)

    async def generate_batch(
        self,
        bundles: Sequence[PromptBundle],
        cache: GenerationCache | None = None,
    ) -> list[GenerationRecord]:
        """
        Generate outputs for many bundles.

        At most ``cfg.parallelism`` requests are in flight. Results follow
        input order. With a cache, already successful pairs are reused and
        every new record is appended as soon as it completes.
        """
        done = cache.completed() if cache is not None else {}
        semaphore = asyncio.Semaphore(self.cfg.parallelism)
        skipped = sum(1 for b in bundles if (b.ipis_id, b.scenario) in done)
        logger.info(
            f"[BATCH] {len(bundles)} bundles, {skipped} cached, parallelism={self.cfg.parallelism}"
        )

        async with self._client() as client:

            async def run(bundle: PromptBundle) -> GenerationRecord:
                cached = done.get((bundle.ipis_id, bundle.scenario))
                if cached is not None:
                    return cached
                async with semaphore:
                    record = await self._generate(client, bundle)
                if cache is not None:
                    cache.append(record)
                return record

            results = await asyncio.gather(*(run(bundle) for bundle in bundles))

        failed = sum(1 for record in results if not record.ok)
        logger.info(f"[BATCH] Finished: {len(results) - failed} ok, {failed} failed")
        return list(results)


def write_predictions(records: Sequence[GenerationRecord], path: str | Path) -> None:
    """Write records as predictions JSONL, one line per record in the given order."""
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.model_dump(mode="json"), ensure_ascii=False) + "\n")
