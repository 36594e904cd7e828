"""Rule-based word/punctuation segmentation shared by notation, normalize and rewriter."""

from dataclasses import dataclass

import regex as re

# Notation characters (*, /), hyphen and apostrophes stay word-internal.
_WORD_CHARS = r"\p{L}\p{N}\p{M}*/'’\-"
TOKEN_PATTERN = re.compile(rf"[{_WORD_CHARS}]+|[^\s{_WORD_CHARS}]+")
ALNUM_PATTERN = re.compile(r"[\p{L}\p{N}]")


@dataclass(frozen=True, slots=True)
class Token:
    """A token with its character span in the original text."""

    text: str
    start: int
    end: int

    @property
    def is_word(self) -> bool:
        """True when the token carries at least one letter or digit."""
        return ALNUM_PATTERN.search(self.text) is not None


def iter_tokens(text: str) -> list[Token]:
    """
    Split text into word runs and punctuation runs, keeping offsets.

    Args:
        text: Any Unicode text

    Returns:
        Tokens in reading order
    """
    return [Token(m.group(), m.start(), m.end()) for m in TOKEN_PATTERN.finditer(text)]
