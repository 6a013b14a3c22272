"""Book ingestion: tagging, the pre-tagged format, and learning-target extraction.

The engine works on <lemma, POS> pairs. Raw text goes through a pluggable
tagger (a small deterministic lexicon+suffix tagger ships as the default);
quantitative work should use the pre-tagged path, which bypasses tagger
quality entirely.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import EmptyText, ParseError

COARSE_TAGS = frozenset({"NOUN", "VERB", "ADJ", "ADV", "PROPN", "OTHER"})

# POS whose units can become learning targets. Proper nouns are names, not
# vocabulary; OTHER covers function words and punctuation.
TARGET_TAGS = frozenset({"NOUN", "VERB", "ADJ", "ADV"})


@dataclass(frozen=True, order=True)
class LexicalUnit:
    """A <lemma, POS> pair; homographs under two POS tags are two units."""

    lemma: str
    pos: str

    def __post_init__(self):
        if not self.lemma or self.lemma != self.lemma.lower() or any(c.isspace() for c in self.lemma):
            raise ValueError(f"bad lemma {self.lemma!r}")
        if self.pos not in COARSE_TAGS:
            raise ValueError(f"bad POS {self.pos!r}")

    def key(self) -> str:
        return f"{self.lemma}|{self.pos}"

    @classmethod
    def from_key(cls, key: str) -> "LexicalUnit":
        lemma, _, pos = key.rpartition("|")
        return cls(lemma, pos)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lemma: str
    pos: str
    sentence_id: int

    def unit(self) -> LexicalUnit:
        return LexicalUnit(self.lemma, self.pos)


@dataclass(frozen=True)
class TaggedCorpus:
    book_id: str
    sentences: tuple[tuple[TaggedToken, ...], ...]

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class TargetIndex:
    """The filtered learning targets of one book plus corpus-level counts."""

    book_id: str
    min_frequency: int
    units: tuple[LexicalUnit, ...]
    occurrences: Mapping[LexicalUnit, tuple[tuple[int, int], ...]]
    unique_word_units: int
    lemma_frequencies: Mapping[str, int]
    sentence_count: int
    token_count: int

    def count(self, unit: LexicalUnit) -> int:
        return len(self.occurrences.get(unit, ()))

    @property
    def unit_set(self) -> frozenset[LexicalUnit]:
        return frozenset(self.units)


# ---------------------------------------------------------------------------
# packaged data

def _data_text(name: str) -> str:
    return resources.files("lexspace.data").joinpath(name).read_text(encoding="utf-8")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword list, one form per line; default is the packaged list."""
    text = Path(path).read_text(encoding="utf-8") if path else _data_text("stopwords_en.txt")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def _load_pos_map() -> dict[str, str]:
    table = {}
    for line in _data_text("pos_map.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fine, coarse = line.split("\t")
        table[fine] = coarse
    return table


_POS_MAP = _load_pos_map()


def coarse_pos(tag: str) -> str:
    """Map a fine-grained tag down to the 6-tag coarse set; unknown -> OTHER."""
    return _POS_MAP.get(tag.strip().upper(), "OTHER")


# ---------------------------------------------------------------------------
# built-in tagger

_TOKEN_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?|\d+(?:\.\d+)?|[^\sA-Za-z\d]")
_TERMINALS = {".", "!", "?"}

_SUBJECT_PRONOUNS = {"i", "you", "he", "she", "it", "we", "they"}
_DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his",
    "her", "its", "our", "their", "some", "any", "no", "each", "every", "another",
}

# Closed-class words and common irregular forms. Auxiliaries and modals map to
# OTHER (they are never learning targets); irregular verb forms carry lemmas.
_LEXICON: dict[str, tuple[str, str]] = {}
for _w in (
    "the a an and or but if because while of in on at by for with from to into "
    "over under about against between through during before after above below "
    "up down out off not no nor so than then once here there when where why how "
    "all both few more most other some such only own same as until again further "
    "is am are was were be been being do does did doing have has had having will "
    "would shall should may might must can could i you he she it we they me him "
    "her us them my your his its our their mine yours hers ours theirs this that "
    "these those who whom whose which what myself yourself himself herself itself "
    "ourselves themselves s t don now very too just also yet ever never always "
    "often soon quite rather almost enough even still perhaps maybe indeed"
).split():
    _LEXICON[_w] = ("OTHER", _w)
for _w, _lemma in {
    "went": "go", "gone": "go", "came": "come", "saw": "see", "seen": "see",
    "took": "take", "taken": "take", "gave": "give", "given": "give",
    "found": "find", "thought": "think", "knew": "know", "known": "know",
    "got": "get", "made": "make", "said": "say", "told": "tell", "felt": "feel",
    "left": "leave", "kept": "keep", "began": "begin", "begun": "begin",
    "brought": "bring", "ran": "run", "held": "hold", "heard": "hear",
    "stood": "stand", "met": "meet", "paid": "pay", "sat": "sit",
    "spoke": "speak", "spoken": "speak", "led": "lead", "wrote": "write",
    "written": "write", "lost": "lose", "meant": "mean", "built": "build",
    "sent": "send", "spent": "spend", "fell": "fall", "fallen": "fall",
    "grew": "grow", "grown": "grow", "drew": "draw", "drawn": "draw",
    "broke": "break", "broken": "break", "wore": "wear", "worn": "wear",
    "chose": "choose", "chosen": "choose", "flew": "fly", "threw": "throw",
    "thrown": "throw", "caught": "catch", "bought": "buy", "taught": "teach",
    "fought": "fight", "sought": "seek", "slept": "sleep", "woke": "wake",
    "drove": "drive", "driven": "drive", "rose": "rise", "risen": "rise",
    "ate": "eat", "eaten": "eat", "swam": "swim", "sang": "sing", "rang": "ring",
    "struck": "strike", "shot": "shoot", "bore": "bear", "borne": "bear",
    "laid": "lay", "lit": "light", "bent": "bend", "swept": "sweep",
    "wept": "weep", "crept": "creep", "dealt": "deal", "hung": "hang",
    "sank": "sink", "sunk": "sink", "shook": "shake", "shaken": "shake",
}.items():
    _LEXICON[_w] = ("VERB", _lemma)

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ance", "ence", "ship", "hood", "ism", "ity")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "ic", "al", "less")


def _plural_lemma(word: str) -> str:
    from . import morphology

    return morphology.strip_inflection(word, "NOUN")


def _verb_lemma(word: str) -> str:
    from . import morphology

    return morphology.strip_inflection(word, "VERB")


class SimpleTagger:
    """Deterministic lexicon + suffix-rule tagger with a NOUN default.

    Good enough for demos and the qualitative tests; anything quantitative
    should go through ``load_pretagged``.
    """

    def __call__(self, raw_text: str) -> list[list[tuple[str, str, str]]]:
        sentences = []
        for sent in self._split_sentences(raw_text):
            tagged: list[tuple[str, str, str]] = []
            for idx, surface in enumerate(sent):
                tagged.append(self._tag_one(surface, idx, tagged))
            sentences.append(tagged)
        return sentences

    @staticmethod
    def _split_sentences(raw_text: str) -> list[list[str]]:
        tokens = _TOKEN_RE.findall(raw_text)
        sentences, current = [], []
        for tok in tokens:
            current.append(tok)
            if tok in _TERMINALS:
                sentences.append(current)
                current = []
        if current:
            sentences.append(current)
        return sentences

    def _tag_one(self, surface: str, idx: int, tagged: list[tuple[str, str, str]]) -> tuple[str, str, str]:
        low = surface.lower()
        if not any(c.isalpha() for c in surface):
            return surface, low, "OTHER"
        if low in _LEXICON:
            pos, lemma = _LEXICON[low]
            return surface, lemma, pos
        if surface[0].isupper() and idx > 0:
            return surface, low, "PROPN"

        prev = tagged[-1] if tagged else None
        prev_low = prev[0].lower() if prev else ""
        if prev and prev_low in _DETERMINERS:
            return surface, _plural_lemma(low), "NOUN"
        if (
            low.endswith("s")
            and not low.endswith(("ss", "us", "is"))
            and prev is not None
            and (prev_low in _SUBJECT_PRONOUNS or prev[2] in ("NOUN", "PROPN"))
        ):
            return surface, _verb_lemma(low), "VERB"

        if low.endswith("ly"):
            return surface, low, "ADV"
        if low.endswith(("ing", "ed")) and len(low) > 5:
            return surface, _verb_lemma(low), "VERB"
        if low.endswith(_NOUN_SUFFIXES):
            return surface, low, "NOUN"
        if low.endswith(_ADJ_SUFFIXES):
            return surface, low, "ADJ"
        if low.endswith("est") and len(low) > 4:
            from . import morphology

            return surface, morphology.strip_inflection(low, "ADJ"), "ADJ"
        if low.endswith("s") and not low.endswith(("ss", "us", "is")):
            return surface, _plural_lemma(low), "NOUN"
        return surface, low, "NOUN"


Tagger = Callable[[str], list[list[tuple[str, str, str]]]]


def _content_id(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()[:12]


def tokenize_and_tag(raw_text: str, tagger: Tagger | None = None, book_id: str | None = None) -> TaggedCorpus:
    """Segment and tag raw text into a TaggedCorpus using the given tagger."""
    if not raw_text or not raw_text.strip():
        raise EmptyText("no text to ingest")
    tagger = tagger or SimpleTagger()
    sentences = []
    for sid, sent in enumerate(tagger(raw_text)):
        sentences.append(tuple(
            TaggedToken(surface, lemma.lower(), pos, sid) for surface, lemma, pos in sent
        ))
    if not sentences:
        raise EmptyText("tagger produced no sentences")
    return TaggedCorpus(book_id or _content_id(raw_text.encode("utf-8")), tuple(sentences))


# ---------------------------------------------------------------------------
# pre-tagged format: "surface<TAB>lemma<TAB>POS", blank line between sentences

def parse_pretagged(text: str, book_id: str | None = None) -> TaggedCorpus:
    sentences: list[tuple[TaggedToken, ...]] = []
    current: list[TaggedToken] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if current:
                sentences.append(tuple(current))
                current = []
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"expected 'surface<TAB>lemma<TAB>POS', got {line!r}", line_no)
        surface, lemma, pos = (p.strip() for p in parts)
        if not surface or not lemma or not pos:
            raise ParseError("empty field", line_no)
        if any(c.isspace() for c in lemma):
            raise ParseError(f"lemma contains whitespace: {lemma!r}", line_no)
        current.append(TaggedToken(surface, lemma.lower(), coarse_pos(pos), len(sentences)))
    if current:
        sentences.append(tuple(current))
    if not sentences:
        raise EmptyText("pre-tagged input has no sentences")
    return TaggedCorpus(book_id or _content_id(text.encode("utf-8")), tuple(sentences))


def load_pretagged(path: str | Path, book_id: str | None = None) -> TaggedCorpus:
    return parse_pretagged(Path(path).read_text(encoding="utf-8"), book_id=book_id)


def export_pretagged(corpus: TaggedCorpus) -> str:
    blocks = []
    for sent in corpus.sentences:
        blocks.append("\n".join(f"{t.surface}\t{t.lemma}\t{t.pos}" for t in sent))
    return "\n\n".join(blocks) + "\n"


def write_pretagged(corpus: TaggedCorpus, path: str | Path) -> None:
    Path(path).write_text(export_pretagged(corpus), encoding="utf-8")


# ---------------------------------------------------------------------------
# target extraction

def _word_like(lemma: str) -> bool:
    return any(c.isalpha() for c in lemma)


def extract_targets(
    corpus: TaggedCorpus,
    stopwords: frozenset[str] | set[str],
    min_frequency: int = 5,
) -> TargetIndex:
    """Keep the <lemma, POS> units frequent enough to be worth learning.

    Units tagged OTHER or PROPN, stopword lemmas, and units below
    ``min_frequency`` are dropped. Occurrence lists are in document order.
    """
    if min_frequency < 1:
        raise ValueError("min_frequency must be >= 1")
    occurrences: dict[LexicalUnit, list[tuple[int, int]]] = {}
    all_units: set[tuple[str, str]] = set()
    lemma_freq: Counter[str] = Counter()
    for sid, sent in enumerate(corpus.sentences):
        for tpos, tok in enumerate(sent):
            if not _word_like(tok.lemma):
                continue
            all_units.add((tok.lemma, tok.pos))
            lemma_freq[tok.lemma] += 1
            if tok.pos not in TARGET_TAGS or tok.lemma in stopwords:
                continue
            occurrences.setdefault(tok.unit(), []).append((sid, tpos))
    kept = {u: tuple(occ) for u, occ in occurrences.items() if len(occ) >= min_frequency}
    return TargetIndex(
        book_id=corpus.book_id,
        min_frequency=min_frequency,
        units=tuple(sorted(kept)),
        occurrences=kept,
        unique_word_units=len(all_units),
        lemma_frequencies=dict(lemma_freq),
        sentence_count=len(corpus.sentences),
        token_count=corpus.token_count,
    )


def target_index_to_json(index: TargetIndex) -> dict:
    return {
        "book_id": index.book_id,
        "min_frequency": index.min_frequency,
        "sentence_count": index.sentence_count,
        "token_count": index.token_count,
        "unique_word_units": index.unique_word_units,
        "lemma_frequencies": dict(sorted(index.lemma_frequencies.items())),
        "units": [
            {
                "lemma": u.lemma,
                "pos": u.pos,
                "occurrences": [list(o) for o in index.occurrences[u]],
            }
            for u in index.units
        ],
    }


def target_index_from_json(doc: dict) -> TargetIndex:
    occurrences = {}
    for entry in doc["units"]:
        unit = LexicalUnit(entry["lemma"], entry["pos"])
        occurrences[unit] = tuple((int(s), int(t)) for s, t in entry["occurrences"])
    return TargetIndex(
        book_id=doc["book_id"],
        min_frequency=int(doc["min_frequency"]),
        units=tuple(sorted(occurrences)),
        occurrences=occurrences,
        unique_word_units=int(doc["unique_word_units"]),
        lemma_frequencies={k: int(v) for k, v in doc["lemma_frequencies"].items()},
        sentence_count=int(doc["sentence_count"]),
        token_count=int(doc["token_count"]),
    )


# ---------------------------------------------------------------------------
# detokenization (shared by activity rendering)

_NO_SPACE_BEFORE = set(".,;:!?)]}%")
_NO_SPACE_AFTER = set("([{")


def detokenize_with_spans(surfaces: Sequence[str]) -> tuple[str, list[tuple[int, int]]]:
    """Join token surfaces into display text; also return each token's char span."""
    parts: list[str] = []
    spans: list[tuple[int, int]] = []
    length = 0
    prev = ""
    for s in surfaces:
        spaced = bool(parts)
        if s and (s[0] in _NO_SPACE_BEFORE or s.startswith("'")):
            spaced = False
        if prev and prev[-1] in _NO_SPACE_AFTER:
            spaced = False
        if spaced:
            parts.append(" ")
            length += 1
        parts.append(s)
        spans.append((length, length + len(s)))
        length += len(s)
        prev = s
    return "".join(parts), spans


def detokenize(surfaces: Sequence[str]) -> str:
    """Join token surfaces back into display text with sane spacing."""
    return detokenize_with_spans(surfaces)[0]
