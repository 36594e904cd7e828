"""
Rule-based baseline proofreader.

Finds generic-masculine forms listed in a lexicon and replaces them with an
inclusive form allowed by the genre profile. Text outside the replaced spans
is never touched.

Workflow:
1. detect: whole-word, longest-match, left-to-right lexicon lookup
2. rewrite: pick a strategy per match and build a RewritePlan
3. self_check: verify that nothing outside the plan changed
"""

import json
import logging
from collections.abc import Iterable, Sequence
from functools import lru_cache
from pathlib import Path

from pydantic import ValidationError

from ipiskit.app.core.config import settings
from ipiskit.app.core.exceptions import GenreProfileError, LexiconError, StrategyNotAllowedError
from ipiskit.app.schemas.notation import StarForm
from ipiskit.app.schemas.rewrite import GenreProfile, LexiconEntry, Match, Replacement, RewritePlan
from ipiskit.app.services.notation import expand, parse_token, render
from ipiskit.app.utils.tokenization import Token, iter_tokens

logger = logging.getLogger(__name__)

MISSING = "-"
SKIP_WINDOW = 3
COORDINATOR = " i "
MODIFIER_CATEGORIES = frozenset({"adjective", "pronoun"})
PHRASE_STRATEGIES = frozenset({"osoba", "neutral"})
COORDINATION_ORDERS = ("masc-first", "fem-first")


class Lexicon:
    """
    Masculine/feminine surface pairs keyed by case-folded masculine form.

    Examples:
        >>> lexicon = Lexicon.load("lexicon_pl.tsv")
        >>> lexicon.get("Laureaci").fem_form
        'laureatki'
    """

    def __init__(self, entries: Iterable[LexiconEntry] = ()):
        self.entries: tuple[LexiconEntry, ...] = tuple(entries)
        self._words: dict[str, LexiconEntry] = {}
        self._phrases: dict[str, list[tuple[tuple[str, ...], LexiconEntry]]] = {}
        for entry in self.entries:
            if entry.is_phrase:
                words = tuple(entry.key.split())
                self._phrases.setdefault(words[0], []).append((words, entry))
            else:
                self._words[entry.key] = entry
        for candidates in self._phrases.values():
            candidates.sort(key=lambda item: len(item[0]), reverse=True)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, form: str) -> bool:
        return self.get(form) is not None

    def get(self, form: str) -> LexiconEntry | None:
        """Single-word entry for a surface form, any case."""
        return self._words.get(form.casefold())

    def phrases_starting_with(self, word: str) -> list[tuple[tuple[str, ...], LexiconEntry]]:
        """Multi-word entries whose first word is ``word``, longest first."""
        return self._phrases.get(word.casefold(), [])

    @classmethod
    def load(cls, path: str | Path) -> "Lexicon":
        """
        Load a TSV lexicon.

        Columns: masc_form, fem_form, star_form, category, case_tag and the
        optional osoba_form and neutral_form. ``-`` marks a missing form and
        ``#`` starts a comment line.

        Raises:
            LexiconError: On a malformed line, a star form that does not expand
                to the masculine/feminine pair, or a repeated masculine form
        """
        entries = []
        seen: dict[str, int] = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                entry = _parse_lexicon_line(line, lineno)
                if entry.key in seen:
                    raise LexiconError(lineno, f"{entry.masc_form!r} already defined on line {seen[entry.key]}")
                seen[entry.key] = lineno
                entries.append(entry)

        logger.info(f"[REWRITE] Loaded {len(entries)} lexicon entries from {path}")
        return cls(entries)


def _optional(value: str | None) -> str | None:
    if value is None:
        return None
    value = value.strip()
    return None if value in ("", MISSING) else value


def _parse_lexicon_line(line: str, lineno: int) -> LexiconEntry:
    columns = line.split("\t")
    if not 5 <= len(columns) <= 7:
        raise LexiconError(lineno, f"expected 5 to 7 tab-separated columns, got {len(columns)}")
    columns += [None] * (7 - len(columns))
    masc, fem, star, category, case_tag, osoba, neutral = columns

    try:
        entry = LexiconEntry(
            masc_form=masc.strip(),
            fem_form=fem.strip(),
            star_form=_optional(star),
            category=category.strip(),
            case_tag=case_tag.strip(),
            osoba_form=_optional(osoba),
            neutral_form=_optional(neutral),
        )
    except ValidationError as e:
        raise LexiconError(lineno, "; ".join(item["msg"] for item in e.errors())) from e

    if entry.is_phrase:
        if entry.star_form is not None:
            raise LexiconError(lineno, "multi-word entries cannot carry a star form")
        if entry.osoba_form is None and entry.neutral_form is None:
            raise LexiconError(lineno, "multi-word entries need an osoba or neutral form")

    if entry.star_form is not None:
        node = parse_token(entry.star_form)
        if not isinstance(node, StarForm) or render(node) != entry.star_form:
            raise LexiconError(lineno, f"{entry.star_form!r} is not a valid star form")
        expanded = [word.casefold() for word in expand(node)]
        if expanded != [entry.masc_form.casefold(), entry.fem_form.casefold()]:
            raise LexiconError(
                lineno,
                f"{entry.star_form!r} expands to {expanded}, not [{entry.masc_form}, {entry.fem_form}]",
            )
    return entry


def load_genres(path: str | Path) -> dict[str, GenreProfile]:
    """
    Load genre profiles from a JSON object mapping genre to strategy list.

    Raises:
        GenreProfileError: If the file is malformed or names an unknown strategy
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise GenreProfileError(str(path), f"invalid JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise GenreProfileError(str(path), "expected an object of genre -> strategies")

    profiles = {}
    for genre, strategies in data.items():
        try:
            profiles[genre] = GenreProfile(genre=genre, strategies=strategies)
        except ValidationError as e:
            raise GenreProfileError(genre, "; ".join(item["msg"] for item in e.errors())) from e
    return profiles


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    return Lexicon.load(settings.resolved_lexicon_path)


@lru_cache(maxsize=1)
def default_genres() -> dict[str, GenreProfile]:
    return load_genres(settings.resolved_genres_path)


def get_profile(genre: str, profiles: dict[str, GenreProfile] | None = None) -> GenreProfile:
    """
    Look up a genre profile.

    Raises:
        GenreProfileError: If the genre is unknown
    """
    profiles = profiles if profiles is not None else default_genres()
    if genre not in profiles:
        raise GenreProfileError(genre, f"unknown genre; known: {', '.join(sorted(profiles))}")
    return profiles[genre]


def _contains_sequence(words: Sequence[str], sequence: Sequence[str]) -> bool:
    n = len(sequence)
    return any(tuple(words[i:i + n]) == tuple(sequence) for i in range(len(words) - n + 1))


def _already_inclusive(words: list[Token], first: int, last: int, entry: LexiconEntry) -> bool:
    """True when the feminine form appears within SKIP_WINDOW words of the match."""
    lo = max(0, first - SKIP_WINDOW)
    hi = min(len(words), last + 1 + SKIP_WINDOW)
    window = [token.text.casefold() for token in words[lo:hi]]
    return _contains_sequence(window, entry.fem_form.casefold().split())


def detect(text: str, lexicon: Lexicon, include_phrases: bool = False) -> list[Match]:
    """
    Find exclusionary expressions.

    Args:
        text: Text to scan
        lexicon: Loaded lexicon
        include_phrases: Also match multi-word periphrasis keys

    Returns:
        Non-overlapping matches in text order. A word already paired with its
        feminine form nearby (coordination) is skipped; tokens in star or slash
        notation never equal a lexicon form and so never match.
    """
    words = [token for token in iter_tokens(text) if token.is_word]
    matches = []
    i = 0
    while i < len(words):
        found = None
        if include_phrases:
            for phrase_words, entry in lexicon.phrases_starting_with(words[i].text):
                last = i + len(phrase_words) - 1
                if last >= len(words):
                    continue
                start, end = words[i].start, words[last].end
                if text[start:end].casefold() == entry.key:
                    found = (last, entry)
                    break
        if found is None:
            entry = lexicon.get(words[i].text)
            if entry is not None:
                found = (i, entry)

        if found is None:
            i += 1
            continue

        last, entry = found
        if _already_inclusive(words, i, last, entry):
            logger.debug(f"[REWRITE] Skipping {words[i].text!r}: feminine form already present")
            i += 1
            continue

        start, end = words[i].start, words[last].end
        matches.append(Match(start=start, end=end, surface=text[start:end], entry=entry))
        i = last + 1
    return matches


def match_case(form: str, surface: str) -> str:
    """
    Carry the case pattern of a matched surface onto a replacement form.

    All-caps surfaces give all-caps forms; a capitalized surface capitalizes
    the first character; otherwise the lexicon spelling is kept.
    """
    if len(surface) > 1 and surface.isupper():
        return form.upper()
    if surface[:1].isupper():
        return form[:1].upper() + form[1:]
    return form


def _lexicon_case(form: str, surface: str) -> str:
    # Second coordinated member: lexicon spelling unless the source shouts.
    if len(surface) > 1 and surface.isupper():
        return form.upper()
    return form


def can_realise(entry: LexiconEntry, strategy: str) -> bool:
    """Whether an entry supports a strategy on its own."""
    if entry.category == "numeral":
        return True
    if strategy == "osoba":
        return entry.osoba_form is not None
    if strategy == "neutral":
        return entry.neutral_form is not None
    if entry.is_phrase:
        return False
    if strategy == "star":
        return entry.star_form is not None
    if strategy == "coordination":
        return entry.category == "noun"
    return strategy == "slash"


def _resolve(entry: LexiconEntry, chosen: str, profile: GenreProfile) -> str | None:
    strategies = list(profile.strategies)
    start = strategies.index(chosen)
    for strategy in strategies[start:] + strategies[:start]:
        if can_realise(entry, strategy):
            return strategy
    return None


def _realise(match: Match, strategy: str) -> str:
    entry, surface = match.entry, match.surface
    if entry.category == "numeral":
        return match_case(entry.fem_form, surface)
    if strategy == "star":
        return match_case(entry.star_form, surface)
    if strategy == "osoba":
        return match_case(entry.osoba_form, surface)
    if strategy == "neutral":
        return match_case(entry.neutral_form, surface)
    return f"{surface}/{match_case(entry.fem_form, surface)}"


def _adjacent(text: str, left: Match, right: Match) -> bool:
    gap = text[left.end:right.start]
    return bool(gap) and gap.isspace()


def _coordinate(
    noun: Match,
    modifier: Match | None,
    order: str,
) -> list[tuple[Match, str]]:
    """Replacements doubling a noun group, e.g. ``laureaci i laureatki``."""
    members = [modifier, noun] if modifier is not None else [noun]
    fem_first = order == "fem-first"

    first_member = [
        match_case(m.entry.fem_form, m.surface) if fem_first else m.surface
        for m in members
    ]
    second_member = " ".join(
        _lexicon_case(m.entry.masc_form if fem_first else m.entry.fem_form, m.surface)
        for m in members
    )

    replacements = []
    if modifier is not None:
        replacements.append((modifier, first_member[0]))
    replacements.append((noun, f"{first_member[-1]}{COORDINATOR}{second_member}"))
    return replacements


def rewrite(
    text: str,
    lexicon: Lexicon,
    profile: GenreProfile,
    strategy: str | None = None,
    coordination_order: str = "masc-first",
) -> tuple[str, RewritePlan]:
    """
    Rewrite generic-masculine expressions inclusively.

    Args:
        text: Source text
        lexicon: Loaded lexicon
        profile: Genre profile limiting the strategies
        strategy: Override; must be allowed by the profile (first allowed otherwise)
        coordination_order: ``masc-first`` or ``fem-first`` for doubled nouns

    Returns:
        (rewritten text, plan). Characters outside the plan spans are
        identical to the input.

    Raises:
        StrategyNotAllowedError: If the override is not in the profile
    """
    if strategy is not None and not profile.allows(strategy):
        raise StrategyNotAllowedError(strategy, profile.genre, list(profile.strategies))
    if coordination_order not in COORDINATION_ORDERS:
        raise ValueError(f"coordination_order must be one of {COORDINATION_ORDERS}")
    chosen = strategy or profile.strategies[0]

    matches = detect(text, lexicon, include_phrases=chosen in PHRASE_STRATEGIES)
    resolved = [(match, _resolve(match.entry, chosen, profile)) for match in matches]

    # A modifier right before a coordinated noun is doubled with it.
    modifier_of: dict[int, int] = {}
    if chosen == "coordination":
        for i in range(1, len(resolved)):
            prev = resolved[i - 1][0]
            match, match_strategy = resolved[i]
            if (
                match_strategy == "coordination"
                and match.entry.category == "noun"
                and prev.entry.category in MODIFIER_CATEGORIES
                and _adjacent(text, prev, match)
            ):
                modifier_of[i] = i - 1
    absorbed = set(modifier_of.values())

    replacements: list[Replacement] = []
    for i, (match, used) in enumerate(resolved):
        if i in absorbed:
            continue
        if used is None:
            logger.debug(f"[REWRITE] No strategy in {profile.strategies} fits {match.surface!r}")
            continue
        if used == "coordination" and match.entry.category == "noun":
            modifier = resolved[modifier_of[i]][0] if i in modifier_of else None
            pairs = _coordinate(match, modifier, coordination_order)
        else:
            pairs = [(match, _realise(match, used))]
        for target, replacement in pairs:
            replacements.append(
                Replacement(
                    start=target.start,
                    end=target.end,
                    replacement=replacement,
                    entry=target.entry,
                    strategy=used,
                )
            )

    plan = RewritePlan(source=text, genre=profile.genre, replacements=tuple(replacements))
    output = plan.apply()
    logger.debug(f"[REWRITE] {len(plan)} replacement(s) with strategy {chosen} for genre {profile.genre}")
    return output, plan


def _residue(text: str, spans: Iterable[tuple[int, int]]) -> str:
    pieces = []
    cursor = 0
    for start, end in spans:
        pieces.append(text[cursor:start])
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces)


def self_check(rewritten: str, plan: RewritePlan) -> bool:
    """
    Verify that a rewrite changed nothing outside its spans.

    Deletes the replacement spans from ``rewritten`` and the matched spans
    from the plan's source; both residues must be identical.
    """
    source_spans = [(item.start, item.end) for item in plan.replacements]
    output_spans = []
    shift = 0
    for item in plan.replacements:
        start = item.start + shift
        output_spans.append((start, start + len(item.replacement)))
        shift += len(item.replacement) - (item.end - item.start)

    if len(rewritten) != len(plan.source) + shift:
        return False
    return _residue(rewritten, output_spans) == _residue(plan.source, source_spans)
