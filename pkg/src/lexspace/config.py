"""Engine configuration: one flat file of tunables with sane defaults.

alpha/beta default so that three consecutive correct answers carry a fresh
node from 0.5 past the 0.8 retirement threshold (0.5 -> 0.65 -> 0.845).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


@dataclass(frozen=True)
class GdexWeights:
    """Sentence-quality feature weights plus the length-band geometry."""

    length: float = 0.3
    known_words: float = 0.3
    no_pronoun: float = 0.15
    completeness: float = 0.15
    target_position: float = 0.1
    ideal_min: int = 10
    ideal_max: int = 25
    floor_min: int = 3
    ceiling_max: int = 50
    high_frequency_min: int = 50


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.3
    beta: float = 0.1
    tau: float = 0.3
    degree_cap: int = 5
    min_frequency: int = 5
    level_cap: int = 6
    session_size: int = 20
    warmstart_size: int = 20
    retirement_threshold: float = 0.8
    gdex: GdexWeights = field(default_factory=GdexWeights)
    embeddings_path: str = ""
    stopwords_path: str = ""  # empty -> packaged English list
    affixes_path: str = ""  # empty -> packaged table
    storage_dir: str = "lexspace-data"
    max_upload_bytes: int = 50_000_000

    def to_json(self) -> dict:
        doc = asdict(self)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(doc)
        if "gdex" in kwargs:
            kwargs["gdex"] = GdexWeights(**kwargs["gdex"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")
