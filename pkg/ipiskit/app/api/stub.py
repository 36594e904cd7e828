"""
Echo stub of a chat-completion endpoint.

Answers every request with the content of its last user turn. Failures,
latency and an in-flight counter can be injected for client tests and
offline pipeline runs.
"""

import asyncio
import logging
import random
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request, status
from pydantic import BaseModel

logger = logging.getLogger(__name__)


class ChatMessage(BaseModel):
    """One wire message."""

    role: str
    content: str


class ChatRequest(BaseModel):
    """Chat-completion request body."""

    model: str
    messages: list[ChatMessage]
    temperature: float = 0.0
    max_tokens: int | None = None


@dataclass
class StubState:
    """Counters and logs shared by all requests to one stub app."""

    in_flight: int = 0
    max_in_flight: int = 0
    requests: int = 0
    events: list[tuple[str, str]] = field(default_factory=list)
    transient_left: dict[str, int] = field(default_factory=dict)
    auth_headers: list[str | None] = field(default_factory=list)

    def started(self) -> list[str]:
        """Last user turns in the order requests started."""
        return [content for event, content in self.events if event == "start"]


def _last_user_turn(body: ChatRequest) -> str:
    for message in reversed(body.messages):
        if message.role == "user":
            return message.content
    raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail="no user message")


def create_stub_app(
    fail_on: dict[str, int] | None = None,
    transient_failures: dict[str, int] | None = None,
    latency: tuple[float, float] = (0.0, 0.0),
    seed: int | None = None,
) -> FastAPI:
    """
    Build a stub app.

    Args:
        fail_on: Substring of the last user turn -> HTTP status returned on every request
        transient_failures: Substring -> number of 500 responses before the stub answers
        latency: Uniform random delay range in seconds per request
        seed: Seed for the latency generator

    Returns:
        FastAPI app; ``app.state.stub`` holds the StubState

    Examples:
        >>> app = create_stub_app(fail_on={"IPIS_test_3": 401})
        >>> transport = httpx.ASGITransport(app=app)
    """
    fail_on = dict(fail_on or {})
    rng = random.Random(seed)
    state = StubState(transient_left=dict(transient_failures or {}))

    app = FastAPI(
        title="IPIS echo stub",
        description="Chat-completion stub that echoes the last user turn",
        version="1.0.0",
    )
    app.state.stub = state

    @app.get("/health")
    async def health_check():
        """Health check endpoint."""
        return {"status": "healthy"}

    @app.post("/v1/chat/completions")
    async def chat_completions(body: ChatRequest, request: Request):
        """Echo the last user turn as the first choice."""
        content = _last_user_turn(body)
        state.requests += 1
        state.auth_headers.append(request.headers.get("authorization"))
        state.in_flight += 1
        state.max_in_flight = max(state.max_in_flight, state.in_flight)
        state.events.append(("start", content))
        try:
            low, high = latency
            if high > 0:
                await asyncio.sleep(rng.uniform(low, high))

            for needle, code in fail_on.items():
                if needle in content:
                    logger.info(f"[STUB] Injected HTTP {code} for {needle!r}")
                    raise HTTPException(status_code=code, detail=f"injected failure for {needle}")

            for needle, left in state.transient_left.items():
                if needle in content and left > 0:
                    state.transient_left[needle] = left - 1
                    logger.info(f"[STUB] Injected transient 500 for {needle!r} ({left - 1} left)")
                    raise HTTPException(
                        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
                        detail="injected transient failure",
                    )

            return {
                "id": f"chatcmpl-{uuid.uuid4().hex[:12]}",
                "object": "chat.completion",
                "model": body.model,
                "choices": [
                    {
                        "index": 0,
                        "message": {"role": "assistant", "content": content},
                        "finish_reason": "stop",
                    }
                ],
            }
        finally:
            state.in_flight -= 1
            state.events.append(("end", content))

    return app
