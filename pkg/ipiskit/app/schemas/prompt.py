"""Chat prompt bundles and system prompt assets."""

from typing import Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ipiskit.app.schemas.record import Language, Task

Scenario = Literal[
    "default",
    "default-pl",
    "default-en",
    "fewshot",
    "fewshot-pl",
    "fewshot-en",
    "tuned",
    "tuned-pl",
    "tuned-en",
]

SCENARIOS: tuple[str, ...] = get_args(Scenario)


class Turn(BaseModel):
    """One chat turn."""

    model_config = ConfigDict(frozen=True)

    role: Literal["user", "assistant"]
    text: str


class PromptBundle(BaseModel):
    """Messages for one record under one scenario."""

    model_config = ConfigDict(frozen=True)

    ipis_id: str
    scenario: Scenario
    system: str | None = None
    turns: tuple[Turn, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_turns(self) -> "PromptBundle":
        if self.turns[-1].role != "user":
            raise ValueError("last turn must be a user turn")
        exemplar_turns = self.turns[:-1]
        for i, turn in enumerate(exemplar_turns):
            expected = "user" if i % 2 == 0 else "assistant"
            if turn.role != expected:
                raise ValueError("exemplars must be complete user/assistant pairs")
        if len(exemplar_turns) % 2:
            raise ValueError("exemplars must be complete user/assistant pairs")
        return self

    @property
    def exemplar_count(self) -> int:
        return (len(self.turns) - 1) // 2

    @property
    def user_text(self) -> str:
        return self.turns[-1].text

    def to_messages(self) -> list[dict[str, str]]:
        """Wire ``messages`` array for a chat-completion request."""
        messages = []
        if self.system is not None:
            messages.append({"role": "system", "content": self.system})
        messages.extend({"role": turn.role, "content": turn.text} for turn in self.turns)
        return messages


class SystemPromptAsset(BaseModel):
    """System prompt text for one task and language."""

    model_config = ConfigDict(frozen=True)

    task: Task
    language: Language
    text: str = Field(..., min_length=1)
