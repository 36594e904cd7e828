"""Normalization units: the stoplist and the bag of tokens."""

from collections import Counter

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Stoplist(BaseModel):
    """Lowercase conjunctions dropped from normalized bags."""

    model_config = ConfigDict(frozen=True)

    conjunctions: frozenset[str] = Field(default_factory=frozenset)
    strip_punctuation: bool = Field(True, description="Drop tokens without letters or digits")

    @field_validator("conjunctions", mode="before")
    @classmethod
    def fold_entries(cls, v):
        return frozenset(word.strip().casefold() for word in v if word.strip())

    @classmethod
    def from_lines(cls, lines) -> "Stoplist":
        """Build from file lines: one token per line, ``#`` starts a comment."""
        words = []
        for line in lines:
            entry = line.split("#", 1)[0].strip()
            if entry:
                words.append(entry)
        return cls(conjunctions=frozenset(words))

    def __contains__(self, token: str) -> bool:
        return token.casefold() in self.conjunctions


class NormalizedBag(BaseModel):
    """Multiset of lowercase expanded tokens; the proofreading comparison unit."""

    model_config = ConfigDict(frozen=True)

    tokens: tuple[str, ...] = Field(..., description="Kept tokens in reading order")
    source_len: int = Field(..., ge=0, description="Token count before filtering")

    @property
    def counts(self) -> Counter:
        return Counter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def same_bag(self, other: "NormalizedBag") -> bool:
        """Multiset equality, ignoring order."""
        return self.counts == other.counts
