"""
Parser and expander for Polish gender-inclusive notation.

Handles the gender star (``pracowni*ków/czek``, ``Student*ka``) and slash
pairs (``student/studentka``). Parsing is total: anything that does not fit
the notation becomes a plain word or a raw node, so an evaluator can score
arbitrary model output.
"""

import logging

from pydantic import TypeAdapter

from ipiskit.app.core.exceptions import NotationRenderError
from ipiskit.app.schemas.notation import (
    ExpansionResult,
    Plain,
    Raw,
    SegmentNode,
    SlashPair,
    StarForm,
)
from ipiskit.app.utils.tokenization import Token, iter_tokens

logger = logging.getLogger(__name__)

STAR = "*"
SLASH = "/"

segment_adapter: TypeAdapter[SegmentNode] = TypeAdapter(SegmentNode)


def _parse_star(token: str) -> StarForm | Raw:
    if token.count(STAR) > 1:
        return Raw(text=token, reason="more than one asterisk")
    if token.endswith(STAR):
        return Raw(text=token, reason="asterisk in final position")

    root, rest = token.split(STAR)
    if not root:
        return Raw(text=token, reason="empty root before asterisk")
    if SLASH in root:
        return Raw(text=token, reason="slash before asterisk")

    if SLASH in rest:
        parts = rest.split(SLASH)
        if len(parts) != 2:
            return Raw(text=token, reason="more than one suffix slash")
        masc, fem = parts
        if not masc or not fem:
            return Raw(text=token, reason="empty suffix around slash")
    else:
        masc, fem = "", rest

    if not fem.isalpha() or (masc and not masc.isalpha()):
        return Raw(text=token, reason="non-alphabetic suffix")
    return StarForm(root=root, masc_suffix=masc, fem_suffix=fem)


def parse_token(token: str) -> SegmentNode:
    """
    Parse one whitespace-delimited token.

    The star parse wins over the slash parse: in ``pracowni*ków/czek`` the
    slash separates the two suffixes.

    Args:
        token: Token text, possibly with internal ``*`` and ``/``

    Returns:
        Plain, StarForm, SlashPair or Raw node

    Examples:
        >>> parse_token("pracowni*ków/czek")
        StarForm(kind='star', root='pracowni', masc_suffix='ków', fem_suffix='czek')
        >>> parse_token("10/12/2024").kind
        'plain'
    """
    if STAR in token:
        node = _parse_star(token)
        if isinstance(node, Raw):
            logger.debug(f"[NOTATION] Unparseable token {token!r}: {node.reason}")
        return node

    if SLASH in token:
        parts = token.split(SLASH)
        if len(parts) == 2 and parts[0].isalpha() and parts[1].isalpha():
            return SlashPair(left=parts[0], right=parts[1])

    return Plain(word=token)


def expand(node: SegmentNode) -> list[str]:
    """
    Expand a node into its surface words.

    Args:
        node: Node produced by parse_token

    Returns:
        [masculine, feminine] for star forms and slash pairs, one word otherwise
    """
    if isinstance(node, StarForm):
        return [node.root + node.masc_suffix, node.root + node.fem_suffix]
    if isinstance(node, SlashPair):
        return [node.left, node.right]
    if isinstance(node, Raw):
        return [node.text]
    return [node.word]


def expansion(node: SegmentNode) -> ExpansionResult | None:
    """Structured expansion for two-form nodes; None for plain and raw nodes."""
    if isinstance(node, (StarForm, SlashPair)):
        masculine, feminine = expand(node)
        return ExpansionResult(masculine=masculine, feminine=feminine, origin=node)
    return None


def render(node: SegmentNode) -> str:
    """
    Serialize a node back to notation.

    Args:
        node: Any node except Raw

    Returns:
        Token text; render(parse_token(t)) == t for every parseable t

    Raises:
        NotationRenderError: If node is Raw
    """
    if isinstance(node, StarForm):
        if node.masc_suffix:
            return f"{node.root}{STAR}{node.masc_suffix}{SLASH}{node.fem_suffix}"
        return f"{node.root}{STAR}{node.fem_suffix}"
    if isinstance(node, SlashPair):
        return f"{node.left}{SLASH}{node.right}"
    if isinstance(node, Raw):
        raise NotationRenderError(node.text, node.reason)
    return node.word


def parse_text(text: str) -> list[tuple[Token, SegmentNode]]:
    """Parse every word token of a text, keeping token offsets."""
    return [(token, parse_token(token.text)) for token in iter_tokens(text) if token.is_word]
