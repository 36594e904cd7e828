"""Integration tests for the chat-completion client against the echo stub."""

import random

import httpx
import pytest

from ipiskit.app.api.stub import create_stub_app
from ipiskit.app.schemas.prompt import PromptBundle, Turn
from ipiskit.app.services.inference import (
    GenerationCache,
    InferenceClient,
    is_retryable,
    write_predictions,
)
from ipiskit.app.services.prompts import build_all
from ipiskit.tests.helpers import make_records


def bundle(i: int, scenario: str = "default") -> PromptBundle:
    return PromptBundle(
        ipis_id=f"IPIS_proofreading_test_{i}",
        scenario=scenario,
        turns=(Turn(role="user", text=f"[{i:02d}] tekst"),),
    )


class RecordingSleep:
    """Stands in for asyncio.sleep and keeps the requested delays."""

    def __init__(self):
        self.delays: list[float] = []

    async def __call__(self, delay: float) -> None:
        self.delays.append(delay)


def make_client(app, cfg, **kwargs) -> InferenceClient:
    return InferenceClient(cfg, transport=httpx.ASGITransport(app=app), **kwargs)


class TestGenerate:
    """Test cases for single requests."""

    async def test_echo(self, stub_app, endpoint_config):
        """Test the stub answer becomes the output."""
        record = await make_client(stub_app, endpoint_config).generate(bundle(1))

        assert record.ok
        assert record.output == "[01] tekst"
        assert record.attempts == 1
        assert stub_app.state.stub.requests == 1

    async def test_full_dataset_bundle(self, stub_app, endpoint_config):
        """Test a bundle built from a record round-trips through the stub."""
        (prompt_bundle,) = build_all(make_records(1), "default")

        record = await make_client(stub_app, endpoint_config).generate(prompt_bundle)

        assert record.output == prompt_bundle.user_text

    async def test_transient_errors_retried(self, endpoint_config):
        """Test two 500 responses are retried and the third attempt succeeds."""
        app = create_stub_app(transient_failures={"[03]": 2})
        sleep = RecordingSleep()

        record = await make_client(app, endpoint_config, sleep=sleep).generate(bundle(3))

        assert record.ok
        assert record.attempts == 3
        assert len(sleep.delays) == 2
        assert app.state.stub.requests == 3

    async def test_client_error_not_retried(self, endpoint_config):
        """Test a 401 fails the record after one attempt."""
        app = create_stub_app(fail_on={"[02]": 401})

        record = await make_client(app, endpoint_config).generate(bundle(2))

        assert not record.ok
        assert record.attempts == 1
        assert "HTTP 401" in record.error
        assert record.output is None

    async def test_retries_exhausted(self, endpoint_config):
        """Test a persistent 503 gives up after max_retries retries."""
        app = create_stub_app(fail_on={"[04]": 503})

        record = await make_client(app, endpoint_config).generate(bundle(4))

        assert record.attempts == endpoint_config.max_retries + 1
        assert "after 4 attempt(s)" in record.error

    async def test_rate_limit_retried(self, endpoint_config):
        """Test 429 counts as retryable."""
        app = create_stub_app(fail_on={"[05]": 429})
        cfg = endpoint_config.model_copy(update={"max_retries": 1})

        record = await make_client(app, cfg).generate(bundle(5))

        assert record.attempts == 2

    async def test_malformed_response(self, endpoint_config):
        """Test a 200 without choices is a non-retryable failure."""
        transport = httpx.MockTransport(lambda request: httpx.Response(200, json={"choices": []}))
        client = InferenceClient(endpoint_config, transport=transport)

        record = await client.generate(bundle(1))

        assert not record.ok
        assert record.attempts == 1
        assert "malformed response" in record.error

    async def test_null_content_fails_only_its_record(self, endpoint_config):
        """Test a null message content becomes one error record, not a crashed batch."""
        def handler(request: httpx.Request) -> httpx.Response:
            content = None if b"[02]" in request.content else "ok"
            return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})

        client = InferenceClient(endpoint_config, transport=httpx.MockTransport(handler))

        records = await client.generate_batch([bundle(i) for i in range(1, 4)])

        assert [record.ok for record in records] == [True, False, True]
        assert records[1].attempts == 1
        assert "malformed response" in records[1].error
        assert "NoneType" in records[1].error

    async def test_connection_errors_retried(self, endpoint_config):
        """Test transport errors are retried like server errors."""
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(request)
            if len(calls) < 3:
                raise httpx.ConnectError("connection refused", request=request)
            return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

        client = InferenceClient(endpoint_config, transport=httpx.MockTransport(handler))

        record = await client.generate(bundle(1))

        assert record.output == "ok"
        assert record.attempts == 3

    async def test_request_body(self, endpoint_config):
        """Test the wire format of a request."""
        seen = []

        def handler(request: httpx.Request) -> httpx.Response:
            seen.append(request)
            return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

        client = InferenceClient(endpoint_config, transport=httpx.MockTransport(handler))
        await client.generate(bundle(1))

        (request,) = seen
        assert str(request.url) == "http://stub/v1/chat/completions"
        body = client.request_body(bundle(1))
        assert body["model"] == "stub-model"
        assert body["messages"] == [{"role": "user", "content": "[01] tekst"}]
        assert body["temperature"] == 0.0

    async def test_bearer_token(self, stub_app, endpoint_config):
        """Test the API key is sent as a bearer token and only when set."""
        keyed = endpoint_config.model_copy(update={"api_key": "secret"})

        await make_client(stub_app, keyed).generate(bundle(1))
        await make_client(stub_app, endpoint_config).generate(bundle(2))

        assert stub_app.state.stub.auth_headers == ["Bearer secret", None]


class TestGenerateBatch:
    """Test cases for batches."""

    async def test_order_and_parallelism_bound(self, endpoint_config):
        """Test results follow input order while at most three requests run at once."""
        app = create_stub_app(latency=(0.005, 0.03), seed=7)
        bundles = [bundle(i) for i in range(12)]

        results = await make_client(app, endpoint_config).generate_batch(bundles)

        assert [r.ipis_id for r in results] == [b.ipis_id for b in bundles]
        assert [r.output for r in results] == [f"[{i:02d}] tekst" for i in range(12)]
        assert 2 <= app.state.stub.max_in_flight <= 3

    async def test_parallelism_one_is_sequential(self, endpoint_config):
        """Test requests start in input order and never overlap."""
        app = create_stub_app(latency=(0.001, 0.005), seed=1)
        cfg = endpoint_config.model_copy(update={"parallelism": 1})
        bundles = [bundle(i) for i in range(5)]

        await make_client(app, cfg).generate_batch(bundles)

        state = app.state.stub
        assert state.max_in_flight == 1
        assert state.started() == [b.user_text for b in bundles]
        assert [event for event, _ in state.events] == ["start", "end"] * 5

    async def test_failure_does_not_abort_batch(self, endpoint_config):
        """Test one failing record leaves the others intact."""
        app = create_stub_app(fail_on={"[07]": 400})
        bundles = [bundle(i) for i in range(10)]

        results = await make_client(app, endpoint_config).generate_batch(bundles)

        assert sum(r.ok for r in results) == 9
        assert not results[7].ok
        assert results[7].ipis_id == "IPIS_proofreading_test_7"

    async def test_resume_from_cache(self, tmp_path, endpoint_config):
        """Test a second run only requests pairs that failed before."""
        cache = GenerationCache(tmp_path / "pred.jsonl")
        bundles = [bundle(i) for i in range(5)]
        no_retry = endpoint_config.model_copy(update={"max_retries": 0})

        first_app = create_stub_app(fail_on={"[02]": 500})
        first = await make_client(first_app, no_retry).generate_batch(bundles, cache=cache)
        assert sum(r.ok for r in first) == 4

        second_app = create_stub_app()
        second = await make_client(second_app, no_retry).generate_batch(bundles, cache=cache)

        assert second_app.state.stub.requests == 1
        assert second_app.state.stub.started() == ["[02] tekst"]
        assert all(r.ok for r in second)
        assert len(cache.completed()) == 5

    async def test_scenario_is_part_of_cache_key(self, tmp_path, stub_app, endpoint_config):
        """Test the same record under another scenario is not reused."""
        cache = GenerationCache(tmp_path / "pred.jsonl")
        client = make_client(stub_app, endpoint_config)

        await client.generate_batch([bundle(1, "default")], cache=cache)
        await client.generate_batch([bundle(1, "tuned")], cache=cache)

        assert stub_app.state.stub.requests == 2


class TestHelpers:
    """Test cases for backoff, cache files and prediction output."""

    @pytest.mark.parametrize("status,expected", [(429, True), (500, True), (503, True), (400, False), (401, False)])
    def test_is_retryable(self, status, expected):
        """Test which statuses are retried."""
        assert is_retryable(status) is expected

    def test_backoff_bounds(self, endpoint_config):
        """Test exponential growth with bounded jitter and a cap."""
        cfg = endpoint_config.model_copy(update={"backoff_base": 0.5, "backoff_max": 8.0})
        client = InferenceClient(cfg, rng=random.Random(0))

        for attempt, base in [(1, 0.5), (2, 1.0), (3, 2.0)]:
            delay = client.backoff(attempt)
            assert base <= delay <= base * 1.5
        assert client.backoff(10) == 8.0

    def test_partial_cache_line_ignored(self, tmp_path):
        """Test a truncated last line does not break loading."""
        path = tmp_path / "pred.jsonl"
        path.write_text(
            '{"ipis_id": "a", "scenario": "default", "output": "x"}\n{"ipis_id": "b", "sce',
            encoding="utf-8",
        )

        assert list(GenerationCache(path).load()) == [("a", "default")]

    async def test_write_predictions(self, tmp_path, stub_app, endpoint_config):
        """Test predictions are written one line per record in order."""
        results = await make_client(stub_app, endpoint_config).generate_batch([bundle(i) for i in range(3)])
        path = tmp_path / "pred.jsonl"

        write_predictions(results, path)

        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3
        assert '"ipis_id": "IPIS_proofreading_test_0"' in lines[0]
