"""Word families via graded affix stripping.

Affixes live in a data table grouped into levels 2..6 (level 1 is the bare
base). Stripping applies orthographic repair (undoubling, e-restoration,
y/i alternation) and rejects a strip whose result is neither a known word
nor at least 4 characters long, which keeps most runaway strips in check.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Collection, Iterable, Mapping

from .errors import ParseError
from .ingestion import LexicalUnit, TargetIndex

_VOWELS = "aeiou"
_MIN_STEM = 3


@dataclass(frozen=True)
class AffixRule:
    affix: str
    kind: str  # "prefix" | "suffix"
    level: int
    strip_to: str = ""

    def __post_init__(self):
        if self.kind not in ("prefix", "suffix"):
            raise ValueError(f"bad kind {self.kind!r}")
        if self.level not in (2, 3, 4, 5, 6):
            raise ValueError(f"bad level {self.level}")
        if not self.affix:
            raise ValueError("empty affix")


class AffixTable:
    """Affix rules ordered for deterministic stripping (longest affix first)."""

    def __init__(self, rules: Iterable[AffixRule]):
        rules = list(rules)
        order = lambda r: (-len(r.affix), r.level, r.affix)
        self.suffixes = sorted((r for r in rules if r.kind == "suffix"), key=order)
        self.prefixes = sorted((r for r in rules if r.kind == "prefix"), key=order)

    def __len__(self) -> int:
        return len(self.suffixes) + len(self.prefixes)


def load_affix_table(path: str | Path | None = None) -> AffixTable:
    """Parse the tab-separated rule file; default is the packaged table."""
    if path:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("lexspace.data").joinpath("affixes_en.tsv").read_text(encoding="utf-8")
    rules = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) not in (3, 4):
            raise ParseError(f"expected 'level<TAB>kind<TAB>affix[<TAB>strip_to]', got {line!r}", line_no)
        try:
            level = int(parts[0])
        except ValueError:
            raise ParseError(f"bad level {parts[0]!r}", line_no) from None
        rules.append(AffixRule(affix=parts[2], kind=parts[1], level=level,
                               strip_to=parts[3] if len(parts) == 4 else ""))
    return AffixTable(rules)


_DEFAULT_TABLE: AffixTable | None = None


def default_affix_table() -> AffixTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_affix_table()
    return _DEFAULT_TABLE


# ---------------------------------------------------------------------------
# stripping machinery

def _suffix_candidates(stem: str, affix: str) -> list[str]:
    """Repair candidates for a suffix strip, most plausible first."""
    cands = []
    vowel_start = affix[0] in _VOWELS
    if stem.endswith("i") and not affix.startswith("i"):
        cands.append(stem[:-1] + "y")  # happi+ness -> happy
    if (
        vowel_start
        and len(stem) >= 3
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-1] not in "lsz"
    ):
        cands.append(stem[:-1])  # runn+ing -> run
    cands.append(stem)
    if vowel_start and not stem.endswith("e"):
        cands.append(stem + "e")  # hop+ing -> hope (vocabulary-confirmed)
    seen, out = set(), []
    for c in cands:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _try_strip(
    word: str,
    rule: AffixRule,
    is_known: Callable[[str], bool] | None,
    validate: bool = True,
) -> str | None:
    if rule.kind == "suffix":
        if not word.endswith(rule.affix) or len(word) == len(rule.affix):
            return None
        if rule.affix == "s" and word.endswith(("ss", "us", "is")):
            return None
        stem = word[: -len(rule.affix)]
        if rule.strip_to:
            candidates = [stem + rule.strip_to]
        else:
            candidates = _suffix_candidates(stem, rule.affix)
    else:
        if not word.startswith(rule.affix) or len(word) == len(rule.affix):
            return None
        stem = word[len(rule.affix):]
        candidates = [rule.strip_to + stem] if rule.strip_to else [stem]

    candidates = [c for c in candidates if len(c) >= _MIN_STEM and len(c) < len(word)]
    if not candidates:
        return None
    chosen = next((c for c in candidates if is_known and is_known(c)), candidates[0])
    if not validate:
        return chosen
    # family-merge safety valve: unknown short bases stop the strip
    if (is_known and is_known(chosen)) or len(chosen) >= 4:
        return chosen
    return None


def reduce_to_base(
    lemma: str,
    table: AffixTable | None = None,
    level_cap: int = 6,
    is_known: Callable[[str], bool] | None = None,
) -> tuple[str, int]:
    """Strip affixes (suffixes before prefixes, longest first) to a fixpoint.

    Returns the final base and the highest affix level used; an unreducible
    lemma comes back unchanged at level 1.
    """
    table = table or default_affix_table()
    current = lemma
    max_level = 1
    while True:
        stripped = None
        for rules in (table.suffixes, table.prefixes):
            for rule in rules:
                if rule.level > level_cap:
                    continue
                result = _try_strip(current, rule, is_known)
                if result is not None:
                    stripped = (result, rule.level)
                    break
            if stripped:
                break
        if not stripped:
            return current, max_level
        current, level = stripped
        max_level = max(max_level, level)


_INFLECTION_AFFIXES = {
    "NOUN": ("ies", "es", "s", "'s"),
    "PROPN": ("'s", "s"),
    "VERB": ("ies", "ied", "ing", "ed", "es", "s"),
    "ADJ": ("ier", "iest", "est", "er"),
    "ADV": (),
    "OTHER": (),
}


def strip_inflection(word: str, pos: str) -> str:
    """Single POS-gated level-2 strip, for lemmatizing raw-text tokens."""
    table = default_affix_table()
    allowed = _INFLECTION_AFFIXES.get(pos, ())
    for rule in table.suffixes:
        if rule.level != 2 or rule.affix not in allowed:
            continue
        result = _try_strip(word, rule, None, validate=False)
        if result is not None:
            return result
    return word


# ---------------------------------------------------------------------------
# families

@dataclass(frozen=True)
class WordFamily:
    id: str
    representative: LexicalUnit
    members: frozenset[LexicalUnit]
    member_levels: Mapping[LexicalUnit, int]

    def level_of(self, unit: LexicalUnit) -> int:
        return self.member_levels[unit]

    def lemmas(self) -> frozenset[str]:
        return frozenset(m.lemma for m in self.members)


def _pick_representative(base: str, members: list[LexicalUnit]) -> LexicalUnit:
    exact = sorted(m for m in members if m.lemma == base)
    if exact:
        return exact[0]
    return min(members, key=lambda m: (len(m.lemma), m.lemma, m.pos))


def build_families(
    targets: TargetIndex,
    table: AffixTable | None = None,
    level_cap: int = 6,
    known_vocab: Collection[str] | None = None,
) -> tuple[WordFamily, ...]:
    """Partition the target units into word families keyed by reduced base.

    A strip is vocabulary-checked against the target lemmas plus
    ``known_vocab`` (typically the embedding vocabulary).
    """
    if not targets.units:
        raise ValueError("no targets to group")
    table = table or default_affix_table()
    target_lemmas = frozenset(u.lemma for u in targets.units)
    vocab = frozenset(known_vocab) if known_vocab else frozenset()

    def known(word: str) -> bool:
        return word in target_lemmas or word in vocab

    groups: dict[str, list[tuple[LexicalUnit, int]]] = {}
    for unit in sorted(targets.units):
        base, level = reduce_to_base(unit.lemma, table, level_cap=level_cap, is_known=known)
        groups.setdefault(base, []).append((unit, level))

    families = []
    for base in sorted(groups):
        members = [u for u, _ in groups[base]]
        levels = {u: lvl for u, lvl in groups[base]}
        families.append(WordFamily(
            id=base,
            representative=_pick_representative(base, members),
            members=frozenset(members),
            member_levels=levels,
        ))
    return tuple(families)


def families_to_json(families: Iterable[WordFamily], book_id: str = "", level_cap: int = 6) -> dict:
    return {
        "book_id": book_id,
        "level_cap": level_cap,
        "families": [
            {
                "id": f.id,
                "representative": {"lemma": f.representative.lemma, "pos": f.representative.pos},
                "members": [
                    {"lemma": m.lemma, "pos": m.pos, "level": f.member_levels[m]}
                    for m in sorted(f.members)
                ],
            }
            for f in sorted(families, key=lambda f: f.id)
        ],
    }


def families_from_json(doc: dict) -> tuple[WordFamily, ...]:
    families = []
    for entry in doc["families"]:
        members = {}
        for m in entry["members"]:
            members[LexicalUnit(m["lemma"], m["pos"])] = int(m["level"])
        families.append(WordFamily(
            id=entry["id"],
            representative=LexicalUnit(entry["representative"]["lemma"], entry["representative"]["pos"]),
            members=frozenset(members),
            member_levels=members,
        ))
    return tuple(families)
