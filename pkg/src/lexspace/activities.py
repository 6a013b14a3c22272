"""Multi-gap cloze activities built from the book's own sentences.

Sentences are ranked per target with a GDEX-style feature mix (length,
known context words, anaphora, completeness, target position); the
known-words feature is personalized through the learner model. Distractors
come from same-POS families at hop distance two, where near-synonym risk is
already low.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .config import GdexWeights
from .errors import (
    InsufficientContext,
    InsufficientDistractors,
    InvalidChoice,
    TargetAbsent,
    UnknownNode,
)
from .ingestion import LexicalUnit, TaggedCorpus, TaggedToken, TargetIndex, detokenize_with_spans
from .learner_model import LearnerModel
from .morphology import WordFamily
from .semantics import FamilyGraph

GAP_MARKER = "____"

# standalone anaphora cues; a parser is out of scope
PRONOUNS = frozenset({
    "he", "she", "it", "they", "him", "her", "them", "his", "hers", "its",
    "their", "this", "that", "these", "those",
})

LEARNING = "learning"
TESTING = "testing"

_AID_TEMPLATES = (
    ("dictionary", "https://en.wiktionary.org/wiki/{word}"),
    ("translation", "https://translate.google.com/?sl=en&text={word}"),
    ("usage", "https://www.wordnik.com/words/{word}"),
)


class BookIndex:
    """Everything activity generation needs to know about one book."""

    def __init__(self, corpus: TaggedCorpus, targets: TargetIndex,
                 families: Iterable[WordFamily], stopwords: frozenset[str],
                 high_frequency_min: int = 50):
        self.corpus = corpus
        self.targets = targets
        self.stopwords = stopwords
        self.family_by_id: dict[str, WordFamily] = {f.id: f for f in families}
        self.unit_to_family: dict[LexicalUnit, str] = {}
        for fam in self.family_by_id.values():
            for member in fam.members:
                self.unit_to_family[member] = fam.id
        self.unit_counts: dict[LexicalUnit, int] = {u: targets.count(u) for u in targets.units}
        self.high_frequency = frozenset(
            lemma for lemma, c in targets.lemma_frequencies.items() if c >= high_frequency_min
        )
        # family -> sentence -> sorted token positions of member occurrences
        self.family_occurrences: dict[str, dict[int, list[int]]] = {}
        for unit, occs in targets.occurrences.items():
            fid = self.unit_to_family.get(unit)
            if fid is None:
                continue
            per_family = self.family_occurrences.setdefault(fid, {})
            for sid, tpos in occs:
                per_family.setdefault(sid, []).append(tpos)
        for per_family in self.family_occurrences.values():
            for positions in per_family.values():
                positions.sort()

    def family_sentences(self, family_id: str) -> list[int]:
        return sorted(self.family_occurrences.get(family_id, {}))

    def sentence(self, sentence_id: int) -> tuple[TaggedToken, ...]:
        return self.corpus.sentences[sentence_id]


@dataclass(frozen=True)
class SentenceScore:
    sentence_id: int
    target: LexicalUnit
    score: float
    feature_values: Mapping[str, float]


@dataclass(frozen=True)
class Aid:
    kind: str
    url_template: str


@dataclass(frozen=True)
class ActivityItem:
    sentence_id: int
    text: str
    gap_spans: tuple[tuple[int, int], ...]  # byte offsets into utf-8 text
    answers: tuple[str, ...]  # gapped surfaces, never sent to clients
    original_text: str


@dataclass(frozen=True)
class Activity:
    activity_id: str
    book_id: str
    target_family: str
    target_unit: LexicalUnit
    mode: str
    items: tuple[ActivityItem, ...]
    options: tuple[LexicalUnit, ...]
    option_labels: tuple[str, ...]
    aids: tuple[Aid, ...] = ()

    @property
    def answer_label(self) -> str:
        return self.option_labels[self.options.index(self.target_unit)]


@dataclass(frozen=True)
class GradedResponse:
    activity_id: str
    chosen: LexicalUnit
    correct: bool
    r: int


# ---------------------------------------------------------------------------
# sentence scoring

def _length_feature(n: int, w: GdexWeights) -> float:
    if w.ideal_min <= n <= w.ideal_max:
        return 1.0
    if n < w.ideal_min:
        return max(0.0, (n - w.floor_min) / (w.ideal_min - w.floor_min))
    return max(0.0, (w.ceiling_max - n) / (w.ceiling_max - w.ideal_max))


def _word_like(lemma: str) -> bool:
    return any(c.isalpha() for c in lemma)


def score_sentence(
    sentence: Sequence[TaggedToken],
    target: LexicalUnit,
    model: LearnerModel,
    index: BookIndex,
    weights: GdexWeights | None = None,
) -> SentenceScore:
    """Weighted feature mix in [0, 1]; recomputable from feature_values."""
    w = weights or GdexWeights()
    family_id = index.unit_to_family.get(target)
    if family_id is None:
        raise TargetAbsent(f"{target.key()} is not a member of any family")
    members = index.family_by_id[family_id].members
    gap_positions = [i for i, tok in enumerate(sentence) if tok.unit() in members]
    if not gap_positions:
        raise TargetAbsent(f"no occurrence of family {family_id!r} in sentence")

    n = len(sentence)
    known = 0
    content = 0
    for i, tok in enumerate(sentence):
        if i in gap_positions or not _word_like(tok.lemma):
            continue
        content += 1
        if tok.lemma in index.stopwords or tok.lemma in index.high_frequency:
            known += 1
            continue
        fid = index.unit_to_family.get(tok.unit())
        if fid is not None and model.mastery.get(fid, 0.5) >= 0.5:
            known += 1

    features = {
        "length": _length_feature(n, w),
        "known_words": known / content if content else 1.0,
        "no_pronoun": 0.0 if any(t.surface.lower() in PRONOUNS for t in sentence) else 1.0,
        "completeness": 1.0 if (sentence[0].surface[:1].isupper()
                                and sentence[-1].surface in (".", "!", "?")) else 0.0,
        "target_position": 1.0 if gap_positions[0] < 0.8 * n else 0.0,
    }
    score = (
        w.length * features["length"]
        + w.known_words * features["known_words"]
        + w.no_pronoun * features["no_pronoun"]
        + w.completeness * features["completeness"]
        + w.target_position * features["target_position"]
    )
    return SentenceScore(sentence[0].sentence_id, target, score, features)


# ---------------------------------------------------------------------------
# distractors

def _pos_member(family: WordFamily, pos: str) -> LexicalUnit | None:
    if family.representative.pos == pos:
        return family.representative
    matching = [m for m in family.members if m.pos == pos]
    if not matching:
        return None
    return min(matching, key=lambda m: (len(m.lemma), m.lemma))


def _bfs_with_products(graph: FamilyGraph, start: str, max_depth: int = 3):
    """Hop distances plus the best edge-weight product along shortest paths."""
    dist = {start: 0}
    best = {start: 1.0}
    frontier = [start]
    for depth in range(1, max_depth + 1):
        nxt: dict[str, float] = {}
        for node in frontier:
            for neighbor, weight in graph.neighbors(node).items():
                if dist.get(neighbor, depth) < depth:
                    continue
                candidate = best[node] * weight
                if neighbor not in dist:
                    dist[neighbor] = depth
                if candidate > nxt.get(neighbor, 0.0):
                    nxt[neighbor] = candidate
        for node, product in nxt.items():
            best[node] = product
        frontier = list(nxt)
    # distances beyond max_depth still needed for the >=2-hop fallback
    queue = deque(frontier)
    while queue:
        node = queue.popleft()
        for neighbor in graph.neighbors(node):
            if neighbor not in dist:
                dist[neighbor] = dist[node] + 1
                queue.append(neighbor)
    return dist, best


def select_distractors(
    graph: FamilyGraph,
    target_family: str,
    pos: str,
    count: int = 3,
    frequencies: Mapping[LexicalUnit, int] | None = None,
) -> list[LexicalUnit]:
    """Same-POS units from families two hops out, strongest connections first.

    Immediate neighbors are never eligible (too synonym-like). When second
    neighbors run short: third neighbors, then any same-POS family at least
    two hops away ordered by book frequency.
    """
    if target_family not in graph:
        raise UnknownNode(target_family)
    dist, product = _bfs_with_products(graph, target_family)
    freq = frequencies or {}

    def family_frequency(family: WordFamily) -> int:
        return max((freq.get(m, 0) for m in family.members), default=0)

    tiers: list[list[str]] = [[], [], []]
    for fid in graph.node_ids:
        if fid == target_family or dist.get(fid, 99) < 2:
            continue
        if _pos_member(graph.family(fid), pos) is None:
            continue
        d = dist.get(fid)
        if d == 2:
            tiers[0].append(fid)
        elif d == 3:
            tiers[1].append(fid)
        else:
            tiers[2].append(fid)
    tiers[0].sort(key=lambda f: (-product.get(f, 0.0), f))
    tiers[1].sort(key=lambda f: (-product.get(f, 0.0), f))
    tiers[2].sort(key=lambda f: (-family_frequency(graph.family(f)), f))

    chosen: list[LexicalUnit] = []
    for tier in tiers:
        for fid in tier:
            if len(chosen) == count:
                return chosen
            chosen.append(_pos_member(graph.family(fid), pos))
    if len(chosen) < count:
        raise InsufficientDistractors(
            f"only {len(chosen)} same-POS candidates at >=2 hops for {target_family!r}"
        )
    return chosen


# ---------------------------------------------------------------------------
# inflection matching for option labels

_VOWELS = "aeiou"


def _wants_double(lemma: str) -> bool:
    return (
        len(lemma) >= 3
        and lemma[-1] not in _VOWELS + "wxy"
        and lemma[-1].isalpha()
        and lemma[-2] in _VOWELS
        and lemma[-3] not in _VOWELS
    )


def inflect(lemma: str, suffix: str) -> str | None:
    """Produce a level-2 inflected form, or None when no rule applies."""
    if not lemma.isalpha():
        return None
    if suffix in ("s", "es"):
        if lemma.endswith(("s", "x", "z", "ch", "sh")):
            return lemma + "es"
        if len(lemma) > 1 and lemma.endswith("y") and lemma[-2] not in _VOWELS:
            return lemma[:-1] + "ies"
        return lemma + "s"
    if suffix == "ed":
        if lemma.endswith("e"):
            return lemma + "d"
        if len(lemma) > 1 and lemma.endswith("y") and lemma[-2] not in _VOWELS:
            return lemma[:-1] + "ied"
        if _wants_double(lemma):
            return lemma + lemma[-1] + "ed"
        return lemma + "ed"
    if suffix == "ing":
        if lemma.endswith("e") and not lemma.endswith("ee"):
            return lemma[:-1] + "ing"
        if _wants_double(lemma):
            return lemma + lemma[-1] + "ing"
        return lemma + "ing"
    if suffix in ("er", "est"):
        if lemma.endswith("e"):
            return lemma + suffix[1:]
        if len(lemma) > 1 and lemma.endswith("y") and lemma[-2] not in _VOWELS:
            return lemma[:-1] + "i" + suffix
        if _wants_double(lemma):
            return lemma + lemma[-1] + suffix
        return lemma + suffix
    return None


def _match_inflection(target_lemma: str, gap_surfaces: set[str]) -> str | None:
    """Suffix whose application to the target lemma yields the single gap form."""
    if len(gap_surfaces) != 1:
        return None
    form = next(iter(gap_surfaces))
    if form == target_lemma:
        return None
    for suffix in ("s", "ed", "ing", "er", "est"):
        if inflect(target_lemma, suffix) == form:
            return suffix
    return None


# ---------------------------------------------------------------------------
# activity assembly

def _byte_spans(text: str, char_spans: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    out = []
    for cs, ce in char_spans:
        start = len(text[:cs].encode("utf-8"))
        out.append((start, start + len(text[cs:ce].encode("utf-8"))))
    return out


def _activity_seed(book_id: str, family_id: str, mode: str) -> int:
    digest = hashlib.sha256(f"{book_id}:{family_id}:{mode}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def generate_activity(
    graph: FamilyGraph,
    index: BookIndex,
    model: LearnerModel,
    target_family: str,
    mode: str,
    seed: int | None = None,
    weights: GdexWeights | None = None,
) -> Activity:
    """Build a 3-4 sentence multi-gap activity for one family.

    Four sentences are used when at least six score above 0.5; every
    family-member occurrence in a chosen sentence becomes a gap.
    """
    if mode not in (LEARNING, TESTING):
        raise ValueError(f"mode must be learning or testing, got {mode!r}")
    if target_family not in graph:
        raise UnknownNode(target_family)
    family = graph.family(target_family)
    sentence_ids = index.family_sentences(target_family)
    if len(sentence_ids) < 3:
        raise InsufficientContext(
            f"family {target_family!r} occurs in only {len(sentence_ids)} sentences"
        )
    target_unit = min(family.members, key=lambda m: (-index.unit_counts.get(m, 0), m.lemma, m.pos))

    scored = [
        score_sentence(index.sentence(sid), target_unit, model, index, weights)
        for sid in sentence_ids
    ]
    scored.sort(key=lambda s: (-s.score, s.sentence_id))
    n_items = 4 if sum(1 for s in scored if s.score > 0.5) >= 6 and len(scored) >= 4 else 3

    items = []
    gap_surfaces: set[str] = set()
    for entry in scored[:n_items]:
        tokens = index.sentence(entry.sentence_id)
        positions = index.family_occurrences[target_family][entry.sentence_id]
        surfaces = [t.surface for t in tokens]
        original_text = detokenize_with_spans(surfaces)[0]
        gapped = list(surfaces)
        for p in positions:
            gapped[p] = GAP_MARKER
        text, char_spans = detokenize_with_spans(gapped)
        spans = _byte_spans(text, (char_spans[p] for p in positions))
        answers = tuple(surfaces[p] for p in positions)
        gap_surfaces.update(a.lower() for a in answers)
        items.append(ActivityItem(
            sentence_id=entry.sentence_id,
            text=text,
            gap_spans=tuple(spans),
            answers=answers,
            original_text=original_text,
        ))

    distractors = select_distractors(
        graph, target_family, target_unit.pos, count=3, frequencies=index.unit_counts
    )
    options = [target_unit, *distractors]
    suffix = _match_inflection(target_unit.lemma, gap_surfaces)
    labels = []
    for option in options:
        label = inflect(option.lemma, suffix) if suffix else None
        labels.append(label or option.lemma)
    if len(set(labels)) != len(labels):
        raise InsufficientDistractors(f"option label collision for {target_family!r}: {labels}")

    rng = random.Random(seed if seed is not None else _activity_seed(index.corpus.book_id, target_family, mode))
    order = list(range(len(options)))
    rng.shuffle(order)

    return Activity(
        activity_id=f"act-{hashlib.sha256(f'{index.corpus.book_id}:{target_family}:{mode}:{seed}'.encode()).hexdigest()[:12]}",
        book_id=index.corpus.book_id,
        target_family=target_family,
        target_unit=target_unit,
        mode=mode,
        items=tuple(items),
        options=tuple(options[i] for i in order),
        option_labels=tuple(labels[i] for i in order),
        aids=tuple(Aid(k, u) for k, u in _AID_TEMPLATES) if mode == LEARNING else (),
    )


def grade(activity: Activity, chosen: LexicalUnit) -> GradedResponse:
    """Grade a choice; the caller applies r to the model only in testing mode."""
    if chosen not in activity.options:
        raise InvalidChoice(f"{chosen.key()} is not an option of {activity.activity_id}")
    correct = chosen == activity.target_unit
    return GradedResponse(activity.activity_id, chosen, correct, 1 if correct else -1)


def activity_to_json(activity: Activity) -> dict:
    """Full server-side record, answer key included. Never send to clients."""
    return {
        "activity_id": activity.activity_id,
        "book_id": activity.book_id,
        "target_family": activity.target_family,
        "target_unit": activity.target_unit.key(),
        "mode": activity.mode,
        "items": [
            {
                "sentence_id": item.sentence_id,
                "text": item.text,
                "gap_spans": [list(span) for span in item.gap_spans],
                "answers": list(item.answers),
                "original_text": item.original_text,
            }
            for item in activity.items
        ],
        "options": [u.key() for u in activity.options],
        "option_labels": list(activity.option_labels),
        "aids": [{"kind": a.kind, "url_template": a.url_template} for a in activity.aids],
    }


def activity_from_json(doc: dict) -> Activity:
    return Activity(
        activity_id=doc["activity_id"],
        book_id=doc["book_id"],
        target_family=doc["target_family"],
        target_unit=LexicalUnit.from_key(doc["target_unit"]),
        mode=doc["mode"],
        items=tuple(
            ActivityItem(
                sentence_id=int(item["sentence_id"]),
                text=item["text"],
                gap_spans=tuple((int(a), int(b)) for a, b in item["gap_spans"]),
                answers=tuple(item["answers"]),
                original_text=item["original_text"],
            )
            for item in doc["items"]
        ),
        options=tuple(LexicalUnit.from_key(k) for k in doc["options"]),
        option_labels=tuple(doc["option_labels"]),
        aids=tuple(Aid(a["kind"], a["url_template"]) for a in doc["aids"]),
    )


def activity_to_client_json(activity: Activity) -> dict:
    """Client payload: no answer key, no target identity."""
    doc = {
        "activity_id": activity.activity_id,
        "mode": activity.mode,
        "items": [
            {
                "sentence_id": item.sentence_id,
                "text": item.text,
                "gap_spans": [list(span) for span in item.gap_spans],
            }
            for item in activity.items
        ],
        "options": list(activity.option_labels),
    }
    if activity.mode == LEARNING:
        doc["aids"] = [{"kind": a.kind, "url_template": a.url_template} for a in activity.aids]
    return doc
