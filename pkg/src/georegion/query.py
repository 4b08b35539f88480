"""Natural-language query layer: grammar, autocompletion, and execution.

The language is small and closed over the dataset:

    query      := show_query | compare_query
    show_query := [intro] {descriptor} entity [spatial]
    compare_query := "compare" region_ref ("and"|"with"|"to") region_ref
    descriptor := "large" | "small" | "recent" | "big"
    entity     := dataset noun ("earthquakes") | "ones" | "them"
    spatial    := ("in" | "near" | "around") [region_ref]
    region_ref := saved region name (longest match) | admin geography name

Parsing is a hand-written recursive descent over lowercased word tokens.  It
never raises: the outcome is Complete (an AST), Partial (expected token
classes plus ranked suggestions, possibly the map-widget trigger), or
Invalid (position and message).  A trailing word that is still being typed
matches by prefix, which keeps every prefix of a valid query alive.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional, Sequence, Union

from .errors import EmptyDataset, PendingSelectionError, UnknownRegion
from .quadtree import GeoPoint, QuadTree

DESCRIPTOR_WORDS = {"large": "large", "big": "large", "small": "small", "recent": "recent"}
PREPOSITIONS = ("in", "near", "around")
CONNECTORS = ("and", "with", "to")
ANAPHORS = ("ones", "them")
ARTICLE = "the"
COMPARE_WORD = "compare"
INTRO_WORDS = {
    "show", "me", "what", "are", "the", "find", "display", "give", "us",
    "list", "please", "can", "you", "all", "a",
}
DEFAULT_DATASET_NOUNS = ("earthquakes",)

TEXT = "text"
WIDGET = "widget"

EXP_INTRO = "intro"
EXP_DESCRIPTOR = "descriptor"
EXP_ENTITY = "entity"
EXP_PREPOSITION = "preposition"
EXP_REGION = "region"
EXP_CONNECTOR = "connector"
EXP_COMPARE = "compare"
EXP_END = "end"


class Descriptor(enum.Enum):
    LARGE = "large"
    SMALL = "small"
    RECENT = "recent"


@dataclass(frozen=True)
class NamedRegionRef:
    name: str


class PendingSelection:
    """Placeholder spatial clause awaiting a map-widget selection."""

    def __repr__(self):
        return "PendingSelection()"

    def __eq__(self, other):
        return isinstance(other, PendingSelection)

    def __hash__(self):
        return hash(PendingSelection)


Spatial = Union[None, NamedRegionRef, PendingSelection]


@dataclass(frozen=True)
class ShowQuery:
    descriptors: tuple[Descriptor, ...] = ()
    spatial: Spatial = None


@dataclass(frozen=True)
class CompareQuery:
    left: str
    right: str


QueryAST = Union[ShowQuery, CompareQuery]


@dataclass(frozen=True)
class Suggestion:
    kind: str                   # "text" | "widget"
    rank: int
    text: Optional[str] = None


@dataclass(frozen=True)
class ParseOutcome:
    status: str                 # "complete" | "partial" | "invalid"
    ast: Optional[QueryAST] = None
    expected: tuple[str, ...] = ()
    suggestions: tuple[Suggestion, ...] = ()
    position: Optional[int] = None
    message: Optional[str] = None
    reason: Optional[str] = None        # machine tag for invalid outcomes

    @property
    def is_complete(self) -> bool:
        return self.status == "complete"

    @property
    def is_partial(self) -> bool:
        return self.status == "partial"

    @property
    def is_invalid(self) -> bool:
        return self.status == "invalid"

    @property
    def wants_widget(self) -> bool:
        return any(s.kind == WIDGET for s in self.suggestions)


@dataclass(frozen=True)
class Vocabulary:
    """Names the parser can resolve; saved regions come recency-ordered."""

    regions: tuple[str, ...] = ()
    geographies: tuple[str, ...] = ()
    dataset_nouns: tuple[str, ...] = DEFAULT_DATASET_NOUNS

    @classmethod
    def coerce(cls, value) -> "Vocabulary":
        if isinstance(value, Vocabulary):
            return value
        return cls(regions=tuple(value))


# ---------------------------------------------------------------------------
# tokenizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    text: str
    start: int
    end: int


def _is_word_char(c: str) -> bool:
    return c.isalnum() or c in "'-_"


def _tokenize(text: str) -> tuple[list[_Token], bool]:
    """Lowercased word tokens plus whether the final token is still open
    (nothing typed after it yet, so it may extend)."""
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        if _is_word_char(text[i]):
            start = i
            while i < n and _is_word_char(text[i]):
                i += 1
            tokens.append(_Token(text[start:i].lower(), start, i))
        else:
            i += 1
    open_final = bool(tokens) and tokens[-1].end == n
    return tokens, open_final


def _name_tokens(name: str) -> tuple[str, ...]:
    return tuple(t.text for t in _tokenize(name)[0])


# ---------------------------------------------------------------------------
# region lexicon and matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _LexEntry:
    canonical: str
    tokens: tuple[str, ...]
    is_region: bool      # saved region (recency-ranked) vs admin geography


class _Lexicon:
    def __init__(self, vocab: Vocabulary):
        self.entries: list[_LexEntry] = []
        seen: set[tuple[str, ...]] = set()
        for name in vocab.regions:
            toks = _name_tokens(name)
            if toks and toks not in seen:
                self.entries.append(_LexEntry(name, toks, True))
                seen.add(toks)
        for name in sorted(vocab.geographies, key=str.lower):
            toks = _name_tokens(name)
            if toks and toks not in seen:
                self.entries.append(_LexEntry(name, toks, False))
                seen.add(toks)


@dataclass
class _RegionMatch:
    full: list[tuple[_LexEntry, int]]   # (entry, next token index), longest first
    partial: list[_LexEntry]            # names the rest of the input could become
    article_partial: bool               # the open final token prefixes "the"


def _match_region(tokens: list[_Token], pos: int, open_final: bool,
                  lexicon: _Lexicon) -> _RegionMatch:
    positions = [pos]
    if pos < len(tokens) and tokens[pos].text == ARTICLE:
        positions.append(pos + 1)   # skippable article before a region name
    full: list[tuple[_LexEntry, int]] = []
    partial: list[_LexEntry] = []
    for p in positions:
        remaining = tokens[p:]
        m = len(remaining)
        for entry in lexicon.entries:
            nt = entry.tokens
            k = len(nt)
            if m >= k and all(remaining[j].text == nt[j] for j in range(k)):
                if (entry, p + k) not in full:
                    full.append((entry, p + k))
            if 1 <= m <= k and all(remaining[j].text == nt[j] for j in range(m - 1)):
                last = remaining[-1].text
                exact_last = last == nt[m - 1]
                prefix_last = open_final and nt[m - 1].startswith(last) and not exact_last
                # a strict prefix of the name keeps the parse alive
                if (exact_last and m < k) or prefix_last:
                    if entry not in partial:
                        partial.append(entry)
    full.sort(key=lambda item: -item[1])
    article_partial = (
        open_final
        and len(tokens) - pos == 1
        and ARTICLE.startswith(tokens[pos].text)
        and tokens[pos].text != ARTICLE
    )
    return _RegionMatch(full, partial, article_partial)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _text_suggestions(words: Iterable[str], start_rank: int = 0,
                      prefix: str = "") -> list[Suggestion]:
    out = []
    rank = start_rank
    seen = set()
    for w in words:
        if w in seen or (prefix and not w.lower().startswith(prefix)):
            continue
        seen.add(w)
        out.append(Suggestion(TEXT, rank, w))
        rank += 1
    return out


def _region_suggestions(lexicon: _Lexicon, *, widget: bool,
                        entries: Optional[list[_LexEntry]] = None,
                        article_prefixed: bool = False) -> list[Suggestion]:
    """Widget trigger (optionally) first, then saved regions, then geographies.

    With ``article_prefixed`` the completions read "the <name>" so that
    replacing a partially-typed article keeps the text parseable.
    """
    out: list[Suggestion] = []
    rank = 0
    seen: set[str] = set()
    if widget:
        out.append(Suggestion(WIDGET, rank))
        rank += 1
    pool = entries if entries is not None else lexicon.entries
    ordered = [e for e in pool if e.is_region] + [e for e in pool if not e.is_region]
    for entry in ordered:
        text = entry.canonical
        if article_prefixed and entry.tokens[0] != ARTICLE:
            text = f"{ARTICLE} {entry.canonical}"
        if text in seen:
            continue
        seen.add(text)
        out.append(Suggestion(TEXT, rank, text))
        rank += 1
    return out


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.vocab = vocab
        self.lexicon = _Lexicon(vocab)
        self.tokens, self.open_final = _tokenize(text)

    # --- outcome builders --------------------------------------------------

    @staticmethod
    def _complete(ast: QueryAST, suggestions: Sequence[Suggestion] = ()) -> ParseOutcome:
        return ParseOutcome("complete", ast=ast, suggestions=tuple(suggestions))

    @staticmethod
    def _partial(expected: Sequence[str],
                 suggestions: Sequence[Suggestion]) -> ParseOutcome:
        return ParseOutcome("partial", expected=tuple(expected),
                            suggestions=tuple(suggestions))

    def _invalid(self, token: _Token, message: str,
                 reason: Optional[str] = None) -> ParseOutcome:
        return ParseOutcome("invalid", position=token.start, message=message,
                            reason=reason)

    # --- helpers -----------------------------------------------------------

    def _at_open_last(self, pos: int) -> bool:
        return self.open_final and pos == len(self.tokens) - 1

    def _exhausted(self, pos: int) -> bool:
        return pos >= len(self.tokens)

    def _entity_words(self) -> list[str]:
        return list(self.vocab.dataset_nouns) + list(ANAPHORS)

    def _start_words(self) -> list[str]:
        return (["show me", "what are the"]
                + sorted(set(DESCRIPTOR_WORDS.values()))
                + list(self.vocab.dataset_nouns)
                + [COMPARE_WORD])

    # --- grammar -----------------------------------------------------------

    def parse(self) -> ParseOutcome:
        pos = self._skip_intro(0)
        if self._exhausted(pos):
            return self._partial(
                [EXP_INTRO, EXP_DESCRIPTOR, EXP_ENTITY, EXP_COMPARE],
                _text_suggestions(self._start_words()))
        tok = self.tokens[pos]
        if tok.text == COMPARE_WORD:
            return self._parse_compare(pos + 1)
        if self._at_open_last(pos) and self._head_zone(pos):
            # still typing the first meaningful word: intro words count too
            known = (tok.text in DESCRIPTOR_WORDS or tok.text in self._entity_words())
            if not known:
                pool = (self._start_words() + sorted(INTRO_WORDS)
                        + sorted(DESCRIPTOR_WORDS) + self._entity_words())
                matches = _text_suggestions(pool, prefix=tok.text)
                if matches:
                    return self._partial(
                        [EXP_INTRO, EXP_DESCRIPTOR, EXP_ENTITY, EXP_COMPARE], matches)
                return self._invalid(tok, f"unknown word {tok.text!r}")
        return self._parse_show(pos)

    def _head_zone(self, pos: int) -> bool:
        return all(t.text in INTRO_WORDS for t in self.tokens[:pos])

    def _skip_intro(self, pos: int) -> int:
        while pos < len(self.tokens):
            tok = self.tokens[pos]
            if tok.text not in INTRO_WORDS or self._at_open_last(pos):
                break
            pos += 1
        return pos

    def _parse_show(self, pos: int) -> ParseOutcome:
        descriptors: list[Descriptor] = []
        while not self._exhausted(pos) and not self._at_open_last(pos) \
                and self.tokens[pos].text in DESCRIPTOR_WORDS:
            descriptors.append(Descriptor(DESCRIPTOR_WORDS[self.tokens[pos].text]))
            pos += 1

        entity_words = self._entity_words()
        follow_words = sorted(set(DESCRIPTOR_WORDS.values())) + entity_words
        if self._exhausted(pos):
            return self._partial([EXP_DESCRIPTOR, EXP_ENTITY],
                                 _text_suggestions(follow_words))
        tok = self.tokens[pos]
        if self._at_open_last(pos) and tok.text in DESCRIPTOR_WORDS:
            # a fully-typed descriptor with nothing after it: entity still needed
            return self._partial([EXP_DESCRIPTOR, EXP_ENTITY],
                                 _text_suggestions(follow_words))
        if tok.text not in entity_words:
            if self._at_open_last(pos):
                matches = _text_suggestions(
                    follow_words + sorted(DESCRIPTOR_WORDS), prefix=tok.text)
                if matches:
                    return self._partial([EXP_DESCRIPTOR, EXP_ENTITY], matches)
            return self._invalid(
                tok, f"unexpected word {tok.text!r}; expected a descriptor or a dataset noun")
        pos += 1

        ast = ShowQuery(descriptors=tuple(dict.fromkeys(descriptors)))
        if self._exhausted(pos):
            return self._complete(ast, _text_suggestions(PREPOSITIONS))
        tok = self.tokens[pos]
        if tok.text not in PREPOSITIONS:
            if self._at_open_last(pos):
                matches = _text_suggestions(PREPOSITIONS, prefix=tok.text)
                if matches:
                    return self._partial([EXP_PREPOSITION, EXP_END], matches)
            return self._invalid(
                tok,
                f"unexpected word {tok.text!r}; expected 'in', 'near', 'around' or end of query")
        if self._at_open_last(pos):
            # preposition typed but not yet delimited; same expectations either way
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=True))
        return self._parse_spatial(ast, pos + 1)

    def _parse_spatial(self, ast: ShowQuery, pos: int) -> ParseOutcome:
        if self._exhausted(pos):
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=True))
        match = _match_region(self.tokens, pos, self.open_final, self.lexicon)
        for entry, next_pos in match.full:
            if self._exhausted(next_pos):
                return self._complete(
                    ShowQuery(ast.descriptors, NamedRegionRef(entry.canonical)))
        if match.partial or match.article_partial:
            return self._partial(
                [EXP_REGION],
                _region_suggestions(self.lexicon, widget=True,
                                    entries=match.partial or None,
                                    article_prefixed=match.article_partial))
        if self.tokens[pos].text == ARTICLE and pos + 1 >= len(self.tokens):
            # dangling article: the region name is still to come
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=True))
        if match.full:
            _, next_pos = match.full[0]
            leftover = self.tokens[next_pos]
            return self._invalid(
                leftover, f"unexpected word {leftover.text!r} after region name")
        # absent or unknown region: the map widget takes over
        return self._partial([EXP_REGION], [Suggestion(WIDGET, 0)])

    def _parse_compare(self, pos: int) -> ParseOutcome:
        if self._exhausted(pos):
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=False))
        match = _match_region(self.tokens, pos, self.open_final, self.lexicon)
        outcomes: list[ParseOutcome] = []
        for entry, next_pos in match.full:
            outcome = self._parse_compare_rest(entry, next_pos)
            if outcome.is_complete:
                return outcome
            outcomes.append(outcome)
        for outcome in outcomes:
            if outcome.is_partial:
                return outcome
        if match.partial or match.article_partial:
            return self._partial(
                [EXP_REGION],
                _region_suggestions(self.lexicon, widget=False,
                                    entries=match.partial or None,
                                    article_prefixed=match.article_partial))
        if self.tokens[pos].text == ARTICLE and pos + 1 >= len(self.tokens):
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=False))
        if outcomes:
            return outcomes[0]
        return self._invalid(self.tokens[pos],
                             f"unknown region {self.tokens[pos].text!r} in comparison",
                             reason="unknown-region")

    def _parse_compare_rest(self, left: _LexEntry, pos: int) -> ParseOutcome:
        if self._exhausted(pos):
            return self._partial([EXP_CONNECTOR], _text_suggestions(CONNECTORS))
        tok = self.tokens[pos]
        if tok.text not in CONNECTORS:
            if self._at_open_last(pos):
                matches = _text_suggestions(CONNECTORS, prefix=tok.text)
                if matches:
                    return self._partial([EXP_CONNECTOR], matches)
            return self._invalid(
                tok, f"unexpected word {tok.text!r}; expected 'and', 'with' or 'to'")
        if self._at_open_last(pos):
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=False))
        pos += 1

        if self._exhausted(pos):
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=False))
        match = _match_region(self.tokens, pos, self.open_final, self.lexicon)
        for entry, next_pos in match.full:
            if self._exhausted(next_pos):
                return self._complete(CompareQuery(left.canonical, entry.canonical))
        if match.partial or match.article_partial:
            return self._partial(
                [EXP_REGION],
                _region_suggestions(self.lexicon, widget=False,
                                    entries=match.partial or None,
                                    article_prefixed=match.article_partial))
        if self.tokens[pos].text == ARTICLE and pos + 1 >= len(self.tokens):
            return self._partial([EXP_REGION],
                                 _region_suggestions(self.lexicon, widget=False))
        if match.full:
            _, next_pos = match.full[0]
            leftover = self.tokens[next_pos]
            return self._invalid(
                leftover, f"unexpected word {leftover.text!r} after comparison")
        tok = self.tokens[pos]
        return self._invalid(tok, f"unknown region {tok.text!r} in comparison",
                             reason="unknown-region")


def parse(text: str, regions: Union[Vocabulary, Sequence[str]] = ()) -> ParseOutcome:
    """Parse a query against the known region and geography names."""
    return _Parser(text, Vocabulary.coerce(regions)).parse()


def suggest_completions(prefix: str,
                        regions: Union[Vocabulary, Sequence[str]] = ()) -> list[Suggestion]:
    """Ranked suggestions for a prefix; empty only for unrecoverable input."""
    return list(parse(prefix, regions).suggestions)


def apply_completion(prefix: str, completion: str) -> str:
    """Apply a text completion the way a UI would: replace the trailing
    partially-typed words when they prefix the completion, else append."""
    tokens, _ = _tokenize(prefix)
    comp_tokens = _name_tokens(completion)
    strip_from: Optional[int] = None
    for take in range(min(len(tokens), len(comp_tokens)), 0, -1):
        tail = tokens[len(tokens) - take:]
        head_ok = all(tail[j].text == comp_tokens[j] for j in range(take - 1))
        last_is_prefix = comp_tokens[take - 1].startswith(tail[-1].text)
        fully_typed = take == len(comp_tokens) and tail[-1].text == comp_tokens[-1]
        if head_ok and last_is_prefix and not fully_typed:
            strip_from = tail[0].start
            break
    if strip_from is not None:
        return prefix[:strip_from] + completion
    base = prefix if (not prefix or prefix.endswith(" ")) else prefix + " "
    return base + completion


# ---------------------------------------------------------------------------
# descriptor semantics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DescriptorThresholds:
    """Dataset-adaptive cutoffs: quartiles by the nearest-rank method."""

    large_min: float        # magnitude >= 75th percentile
    small_max: float        # magnitude <= 25th percentile
    recent_min: datetime    # timestamp >= 75th percentile


def _nearest_rank(sorted_values: Sequence, fraction: float):
    n = len(sorted_values)
    k = max(1, math.ceil(fraction * n))
    return sorted_values[k - 1]


def descriptor_thresholds(points: Sequence[GeoPoint]) -> DescriptorThresholds:
    """Compute the quartile cutoffs once per dataset load."""
    if not points:
        raise EmptyDataset("cannot derive descriptor thresholds from an empty dataset")
    mags = sorted(p.magnitude for p in points)
    times = sorted(p.timestamp for p in points)
    return DescriptorThresholds(
        large_min=_nearest_rank(mags, 0.75),
        small_max=_nearest_rank(mags, 0.25),
        recent_min=_nearest_rank(times, 0.75),
    )


def resolve_descriptor(d: Descriptor, points: Sequence[GeoPoint],
                       thresholds: Optional[DescriptorThresholds] = None):
    """Predicate over GeoPoint for one descriptor word."""
    t = thresholds if thresholds is not None else descriptor_thresholds(points)
    if d is Descriptor.LARGE:
        return lambda p: p.magnitude >= t.large_min
    if d is Descriptor.SMALL:
        return lambda p: p.magnitude <= t.small_max
    return lambda p: p.timestamp >= t.recent_min


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonStats:
    name: str
    count: int
    min: Optional[float] = None
    max: Optional[float] = None
    mean: Optional[float] = None


@dataclass(frozen=True)
class QueryResult:
    kind: str                    # "show" | "compare"
    points: tuple[GeoPoint, ...] = ()
    filters: tuple[str, ...] = ()
    left: Optional[ComparisonStats] = None
    right: Optional[ComparisonStats] = None


class MappingResolver:
    """Region resolver over a plain name -> geography-set mapping."""

    def __init__(self, mapping: dict[str, Iterable[str]]):
        self._mapping = {name.lower(): frozenset(geos) for name, geos in mapping.items()}

    def resolve_region(self, name: str) -> Optional[frozenset]:
        return self._mapping.get(name.lower())


def _resolve_or_raise(regions, name: str) -> frozenset:
    geos = regions.resolve_region(name) if regions is not None else None
    if geos is None:
        raise UnknownRegion(f"unknown region {name!r}")
    return geos


def region_stats(name: str, geographies: frozenset, points: Sequence[GeoPoint]) -> ComparisonStats:
    mags = [p.magnitude for p in points if p.admin_geography in geographies]
    if not mags:
        return ComparisonStats(name=name, count=0)
    return ComparisonStats(
        name=name,
        count=len(mags),
        min=min(mags),
        max=max(mags),
        mean=sum(mags) / len(mags),
    )


def compare_regions(a, b, points: Sequence[GeoPoint]) -> tuple[ComparisonStats, ComparisonStats]:
    """Per-region magnitude statistics; regions carry name + included geographies."""
    return (
        region_stats(a.name, frozenset(a.included_geographies), points),
        region_stats(b.name, frozenset(b.included_geographies), points),
    )


def execute(ast: QueryAST, points: Sequence[GeoPoint], index: QuadTree,
            regions=None,
            thresholds: Optional[DescriptorThresholds] = None) -> QueryResult:
    """Run a complete query against a dataset snapshot.

    Show queries intersect descriptor predicates with region membership
    (a point belongs to a region when its admin geography is in the
    region's included set).  Compare queries return per-region statistics.
    Pending selections must be resolved through the widget before execution.
    """
    if isinstance(ast, CompareQuery):
        left_geos = _resolve_or_raise(regions, ast.left)
        right_geos = _resolve_or_raise(regions, ast.right)
        return QueryResult(
            kind="compare",
            filters=(f"compare {ast.left} vs {ast.right}",),
            left=region_stats(ast.left, left_geos, points),
            right=region_stats(ast.right, right_geos, points),
        )

    if isinstance(ast.spatial, PendingSelection):
        raise PendingSelectionError(
            "query carries an unresolved map selection; complete it in the widget first")

    filters: list[str] = []
    preds = []
    if ast.descriptors:
        t = thresholds if thresholds is not None else descriptor_thresholds(points)
        for d in dict.fromkeys(ast.descriptors):
            preds.append(resolve_descriptor(d, points, t))
            if d is Descriptor.LARGE:
                filters.append(f"large: magnitude >= {t.large_min:g}")
            elif d is Descriptor.SMALL:
                filters.append(f"small: magnitude <= {t.small_max:g}")
            else:
                filters.append(f"recent: time >= {t.recent_min.isoformat()}")

    geo_set: Optional[frozenset] = None
    if isinstance(ast.spatial, NamedRegionRef):
        geo_set = _resolve_or_raise(regions, ast.spatial.name)
        filters.append(f"in {ast.spatial.name}")

    selected = []
    for p in points:
        if geo_set is not None and p.admin_geography not in geo_set:
            continue
        if all(pred(p) for pred in preds):
            selected.append(p)
    return QueryResult(kind="show", points=tuple(selected), filters=tuple(filters))
