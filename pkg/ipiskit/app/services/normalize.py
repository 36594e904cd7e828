"""
Normalization of proofreading texts into comparable bags of tokens.

Pipeline order is fixed: tokenize, parse and expand inclusive notation,
case-fold, then drop punctuation and stoplist members. Word order is
irrelevant downstream; duplicates are kept.
"""

import logging
from functools import lru_cache
from pathlib import Path

import regex as re

from ipiskit.app.core.config import ASSETS_DIR
from ipiskit.app.schemas.normalize import NormalizedBag, Stoplist
from ipiskit.app.schemas.notation import Raw
from ipiskit.app.services.notation import expand, parse_token
from ipiskit.app.utils.tokenization import ALNUM_PATTERN, iter_tokens

logger = logging.getLogger(__name__)

DEFAULT_STOPLIST_PATH = ASSETS_DIR / "stoplist_pl.txt"
NOTATION_SPLIT = re.compile(r"[*/]+")


def load_stoplist(path: str | Path) -> Stoplist:
    """
    Load a stoplist file (UTF-8, one token per line, ``#`` comments).

    Args:
        path: Stoplist file

    Returns:
        Stoplist with case-folded entries
    """
    with open(path, encoding="utf-8") as f:
        stoplist = Stoplist.from_lines(f)
    logger.info(f"[NORMALIZE] Loaded {len(stoplist.conjunctions)} stoplist entries from {path}")
    return stoplist


@lru_cache(maxsize=1)
def default_stoplist() -> Stoplist:
    """Bundled Polish conjunction stoplist."""
    return load_stoplist(DEFAULT_STOPLIST_PATH)


def tokenize(text: str) -> list[str]:
    """
    Split text into word tokens and punctuation tokens.

    Args:
        text: Any Unicode text

    Returns:
        Tokens in order; notation characters stay inside words

    Examples:
        >>> tokenize("W 24-osobowym składzie.")
        ['W', '24-osobowym', 'składzie', '.']
    """
    return [token.text for token in iter_tokens(text)]


def _surface_words(raw: str) -> list[str]:
    node = parse_token(raw)
    if isinstance(node, Raw):
        # Malformed notation contributes its pieces, never the notation characters.
        return [piece for piece in NOTATION_SPLIT.split(node.text) if piece]
    return expand(node)


def normalize(text: str, stoplist: Stoplist | None = None) -> NormalizedBag:
    """
    Normalize a text into a bag of tokens.

    Args:
        text: Any Unicode text
        stoplist: Tokens to drop (defaults to the bundled Polish stoplist)

    Returns:
        NormalizedBag with expanded, case-folded, filtered tokens
    """
    stoplist = stoplist if stoplist is not None else default_stoplist()
    raw_tokens = tokenize(text)

    kept: list[str] = []
    for raw in raw_tokens:
        for word in _surface_words(raw):
            word = word.casefold()
            if stoplist.strip_punctuation and not ALNUM_PATTERN.search(word):
                continue
            if word in stoplist.conjunctions:
                continue
            kept.append(word)

    return NormalizedBag(tokens=tuple(kept), source_len=len(raw_tokens))


def normalize_many(texts: list[str], stoplist: Stoplist | None = None) -> list[NormalizedBag]:
    """Normalize several texts with one stoplist."""
    stoplist = stoplist if stoplist is not None else default_stoplist()
    return [normalize(text, stoplist) for text in texts]
