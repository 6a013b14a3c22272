"""Ties the pipeline together behind a persistent, concurrency-safe core.

Storage is content-addressed JSON on disk: book artifacts are immutable
once built, learner models are single-writer with atomic snapshot writes,
and every model carries its own replayable update log.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from pathlib import Path

from . import activities as act
from . import ingestion, learner_model as lm, morphology, planner, semantics
from .config import EngineConfig
from .errors import (
    AlreadyAnswered,
    EmptyText,
    InsufficientContext,
    InsufficientDistractors,
    InvalidChoice,
    LexspaceError,
    NotFound,
    PayloadTooLarge,
)

INGESTING = "ingesting"
BUILDING = "building"
READY = "ready"
FAILED = "failed"


def _write_json_atomic(path: Path, doc: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
    tmp.replace(path)


def _read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


class TutorService:
    """Core application service; the HTTP layer in api.py is a thin shell."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.root = Path(self.config.storage_dir)
        for sub in ("books", "learners", "sessions"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self.stopwords = ingestion.load_stopwords(self.config.stopwords_path or None)
        self.affixes = morphology.load_affix_table(self.config.affixes_path or None)
        self.params = lm.UpdateParams(alpha=self.config.alpha, beta=self.config.beta)
        self.gdex = self.config.gdex
        self._state_lock = threading.Lock()
        self._learner_locks: dict[tuple[str, str], threading.Lock] = {}
        self._graph_cache: dict[str, semantics.FamilyGraph] = {}
        self._index_cache: dict[str, act.BookIndex] = {}

    # ------------------------------------------------------------------
    # books

    def _book_dir(self, book_id: str) -> Path:
        return self.root / "books" / book_id

    def _record_path(self, book_id: str) -> Path:
        return self._book_dir(book_id) / "record.json"

    def _load_record(self, book_id: str) -> dict:
        path = self._record_path(book_id)
        if not path.exists():
            raise NotFound(f"unknown book {book_id!r}")
        return _read_json(path)

    def _save_record(self, record: dict) -> None:
        _write_json_atomic(self._record_path(record["book_id"]), record)

    def upload_book(
        self,
        title: str,
        text: str | None = None,
        pretagged: str | None = None,
        block: bool = False,
    ) -> str:
        """Register a book and start the ingest -> families -> graph pipeline.

        Idempotent on content: the book id is a hash of the payload.
        """
        payload = pretagged if pretagged is not None else (text or "")
        raw = payload.encode("utf-8")
        if len(raw) > self.config.max_upload_bytes:
            raise PayloadTooLarge(f"{len(raw)} bytes > limit {self.config.max_upload_bytes}")
        book_id = hashlib.sha256(raw).hexdigest()[:12]

        with self._state_lock:
            path = self._record_path(book_id)
            if path.exists():
                record = _read_json(path)
                if record["status"] != FAILED:
                    return book_id
            self._book_dir(book_id).mkdir(parents=True, exist_ok=True)
            self._save_record({
                "book_id": book_id,
                "title": title,
                "status": INGESTING,
                "reason": None,
                "counts": None,
            })

        if block:
            self._build(book_id, title, text, pretagged)
        else:
            worker = threading.Thread(
                target=self._build, args=(book_id, title, text, pretagged), daemon=True
            )
            worker.start()
        return book_id

    def _build(self, book_id: str, title: str, text: str | None, pretagged: str | None) -> None:
        record = {"book_id": book_id, "title": title, "status": INGESTING, "reason": None, "counts": None}
        try:
            if pretagged is not None:
                corpus = ingestion.parse_pretagged(pretagged, book_id=book_id)
            else:
                if text is None:
                    raise EmptyText("no text payload")
                corpus = ingestion.tokenize_and_tag(text, book_id=book_id)
            ingestion.write_pretagged(corpus, self._book_dir(book_id) / "corpus.tags")
            targets = ingestion.extract_targets(corpus, self.stopwords, self.config.min_frequency)
            _write_json_atomic(self._book_dir(book_id) / "index.json",
                               ingestion.target_index_to_json(targets))

            record["status"] = BUILDING
            self._save_record(record)

            if not self.config.embeddings_path:
                raise LexspaceError("no embeddings configured (set embeddings_path)")
            vocab = {u.lemma for u in targets.units}
            surface_forms: dict[ingestion.LexicalUnit, set[str]] = {}
            for unit in targets.units:
                forms = {
                    corpus.sentences[s][t].surface.lower()
                    for s, t in targets.occurrences[unit]
                }
                surface_forms[unit] = forms
                vocab.update(forms)
            vocab.update(targets.lemma_frequencies)
            table = semantics.load_embeddings(self.config.embeddings_path, vocabulary=vocab)

            families = morphology.build_families(
                targets, self.affixes, level_cap=self.config.level_cap,
                known_vocab=table.vocabulary,
            )
            _write_json_atomic(self._book_dir(book_id) / "families.json",
                               morphology.families_to_json(families, book_id, self.config.level_cap))

            graph = semantics.build_graph(
                families, table, tau=self.config.tau, degree_cap=self.config.degree_cap,
                book_id=book_id, surface_forms=surface_forms,
            )
            _write_json_atomic(self._book_dir(book_id) / "graph.json",
                               semantics.graph_to_json(graph))

            record["status"] = READY
            record["counts"] = {
                "sentences": targets.sentence_count,
                "tokens": targets.token_count,
                "unique_units": targets.unique_word_units,
                "targets": len(targets.units),
                "families": len(families),
                "nodes": len(graph),
                "edges": len(graph.edges),
            }
            self._save_record(record)
        except Exception as exc:  # pipeline failures land in the record
            record["status"] = FAILED
            record["reason"] = f"{type(exc).__name__}: {exc}"
            self._save_record(record)

    def book_status(self, book_id: str) -> dict:
        return self._load_record(book_id)

    def _require_ready(self, book_id: str) -> dict:
        record = self._load_record(book_id)
        if record["status"] != READY:
            raise NotFound(f"book {book_id!r} is not ready (status {record['status']})")
        return record

    def graph(self, book_id: str) -> semantics.FamilyGraph:
        """The served graph always comes from the exported artifact."""
        self._require_ready(book_id)
        with self._state_lock:
            if book_id not in self._graph_cache:
                doc = _read_json(self._book_dir(book_id) / "graph.json")
                self._graph_cache[book_id] = semantics.graph_from_json(doc)
            return self._graph_cache[book_id]

    def graph_json(self, book_id: str) -> dict:
        self._require_ready(book_id)
        return _read_json(self._book_dir(book_id) / "graph.json")

    def book_index(self, book_id: str) -> act.BookIndex:
        self._require_ready(book_id)
        with self._state_lock:
            if book_id not in self._index_cache:
                corpus = ingestion.load_pretagged(self._book_dir(book_id) / "corpus.tags", book_id=book_id)
                targets = ingestion.target_index_from_json(_read_json(self._book_dir(book_id) / "index.json"))
                families = morphology.families_from_json(_read_json(self._book_dir(book_id) / "families.json"))
                self._index_cache[book_id] = act.BookIndex(
                    corpus, targets, families, self.stopwords,
                    high_frequency_min=self.gdex.high_frequency_min,
                )
            return self._index_cache[book_id]

    # ------------------------------------------------------------------
    # learner models

    def _model_path(self, learner_id: str, book_id: str) -> Path:
        directory = self.root / "learners" / learner_id
        directory.mkdir(parents=True, exist_ok=True)
        return directory / f"{book_id}.json"

    def _learner_lock(self, learner_id: str, book_id: str) -> threading.Lock:
        with self._state_lock:
            return self._learner_locks.setdefault((learner_id, book_id), threading.Lock())

    def get_model(self, learner_id: str, book_id: str) -> lm.LearnerModel:
        """Load the learner's model for this book, creating it on first contact."""
        graph = self.graph(book_id)
        path = self._model_path(learner_id, book_id)
        if path.exists():
            return lm.model_from_json(_read_json(path))
        model = lm.init_model(graph, learner_id, params=self.params)
        _write_json_atomic(path, lm.model_to_json(model))
        return model

    def _save_model(self, model: lm.LearnerModel, book_id: str) -> None:
        _write_json_atomic(self._model_path(model.learner_id, book_id), lm.model_to_json(model))

    @staticmethod
    def _model_summary(model: lm.LearnerModel, updated: int) -> dict:
        return {
            "learner_id": model.learner_id,
            "book_id": model.graph_ref,
            "updated": updated,
            "above_half": sum(1 for v in model.mastery.values() if v > 0.5),
            "below_half": sum(1 for v in model.mastery.values() if v < 0.5),
            "touched": sum(1 for v in model.touched.values() if v),
        }

    # ------------------------------------------------------------------
    # warm start

    def start_warmstart(self, learner_id: str, book_id: str, test_size: int | None = None) -> dict:
        graph = self.graph(book_id)
        model = self.get_model(learner_id, book_id)
        families = planner.plan_warmstart(graph, model, test_size or self.config.warmstart_size)
        return {
            "learner_id": learner_id,
            "book_id": book_id,
            "words": [
                {"family": fid, "label": graph.family(fid).representative.lemma}
                for fid in families
            ],
        }

    def submit_warmstart(self, learner_id: str, book_id: str, answers: list[tuple[str, bool]]) -> dict:
        graph = self.graph(book_id)
        with self._learner_lock(learner_id, book_id):
            model = self.get_model(learner_id, book_id)
            for family, known in answers:
                model = lm.apply_yesno(model, graph, family, known, params=self.params)
            self._save_model(model, book_id)
        return self._model_summary(model, updated=len(answers))

    # ------------------------------------------------------------------
    # sessions

    def _session_path(self, session_id: str) -> Path:
        return self.root / "sessions" / f"{session_id}.json"

    def _load_session(self, session_id: str) -> dict:
        path = self._session_path(session_id)
        if not path.exists():
            raise NotFound(f"unknown session {session_id!r}")
        session = _read_json(path)
        pointer = self.root / "learners" / session["learner_id"] / f"{session['book_id']}.active"
        if not pointer.exists() or pointer.read_text(encoding="utf-8").strip() != session_id:
            raise NotFound(f"session {session_id!r} was abandoned by a newer session")
        return session

    def _save_session(self, session: dict) -> None:
        _write_json_atomic(self._session_path(session["session_id"]), session)

    def start_session(self, learner_id: str, book_id: str, mode: str) -> dict:
        if mode not in (act.LEARNING, act.TESTING):
            raise ValueError(f"mode must be learning or testing, got {mode!r}")
        graph = self.graph(book_id)
        model = self.get_model(learner_id, book_id)
        plan = planner.plan_session(
            graph, model, self.config.session_size, self.config.retirement_threshold
        )
        session = {
            "session_id": f"sess-{uuid.uuid4().hex[:12]}",
            "learner_id": learner_id,
            "book_id": book_id,
            "mode": mode,
            "plan": list(plan.targets),
            "created_from": plan.created_from,
            "cursor": 0,
            "current_activity": None,
            "activities": {},
            "answered": {},
            "skipped": [],
            "last_changed": [],
            "summary": {"answered": 0, "correct": 0},
        }
        self._save_session(session)
        # one active session per (learner, book): the newest wins
        pointer = self.root / "learners" / learner_id / f"{book_id}.active"
        pointer.parent.mkdir(parents=True, exist_ok=True)
        pointer.write_text(session["session_id"], encoding="utf-8")
        return self._session_view(session)

    @staticmethod
    def _session_view(session: dict) -> dict:
        return {
            "session_id": session["session_id"],
            "learner_id": session["learner_id"],
            "book_id": session["book_id"],
            "mode": session["mode"],
            "size": len(session["plan"]),
            "position": session["cursor"],
        }

    def next_activity(self, session_id: str) -> dict:
        session = self._load_session(session_id)
        if session["current_activity"] and session["current_activity"] not in session["answered"]:
            activity = act.activity_from_json(session["activities"][session["current_activity"]])
            return act.activity_to_client_json(activity)

        graph = self.graph(session["book_id"])
        index = self.book_index(session["book_id"])
        model = self.get_model(session["learner_id"], session["book_id"])
        while session["cursor"] < len(session["plan"]):
            family = session["plan"][session["cursor"]]
            seed = int.from_bytes(
                hashlib.sha256(f"{session_id}:{session['cursor']}".encode()).digest()[:8], "big"
            )
            try:
                activity = act.generate_activity(
                    graph, index, model, family, session["mode"], seed=seed, weights=self.gdex
                )
            except (InsufficientContext, InsufficientDistractors):
                session["skipped"].append(family)
                session["cursor"] += 1
                continue
            session["activities"][activity.activity_id] = act.activity_to_json(activity)
            session["current_activity"] = activity.activity_id
            self._save_session(session)
            return act.activity_to_client_json(activity)

        self._save_session(session)
        return {"complete": True, "summary": session["summary"]}

    def submit_answer(self, session_id: str, activity_id: str, chosen: str) -> dict:
        session = self._load_session(session_id)
        if activity_id not in session["activities"]:
            raise NotFound(f"activity {activity_id!r} was not served in this session")
        if activity_id in session["answered"]:
            raise AlreadyAnswered(activity_id)
        activity = act.activity_from_json(session["activities"][activity_id])
        if chosen not in activity.option_labels:
            raise InvalidChoice(f"{chosen!r} is not an option")
        chosen_unit = activity.options[activity.option_labels.index(chosen)]
        graded = act.grade(activity, chosen_unit)

        changed: list[dict] = []
        if session["mode"] == act.TESTING:
            graph = self.graph(session["book_id"])
            with self._learner_lock(session["learner_id"], session["book_id"]):
                model = self.get_model(session["learner_id"], session["book_id"])
                updated = lm.apply_response(model, graph, activity.target_family, graded.r,
                                            params=self.params)
                for fid in sorted(updated.mastery):
                    old, new = model.mastery[fid], updated.mastery[fid]
                    if old != new:
                        color = lm.mastery_color(new, updated.is_touched(fid))
                        changed.append({"family": fid, "old": old, "new": new, "band": color.band})
                self._save_model(updated, session["book_id"])

        session["answered"][activity_id] = {"chosen": chosen, "correct": graded.correct}
        session["last_changed"] = [c["family"] for c in changed]
        session["summary"]["answered"] += 1
        session["summary"]["correct"] += int(graded.correct)
        session["cursor"] += 1
        session["current_activity"] = None
        self._save_session(session)
        return {
            "activity_id": activity_id,
            "correct": graded.correct,
            "answer": activity.answer_label,
            "changed": changed,
        }

    def _answer_key(self, session_id: str, activity_id: str) -> str:
        """Test-only oracle: the answer label of a served activity."""
        session = self._load_session(session_id)
        if activity_id not in session["activities"]:
            raise NotFound(f"activity {activity_id!r} was not served in this session")
        return act.activity_from_json(session["activities"][activity_id]).answer_label

    # ------------------------------------------------------------------
    # open learner model export

    def _active_session(self, learner_id: str, book_id: str) -> dict | None:
        pointer = self.root / "learners" / learner_id / f"{book_id}.active"
        if not pointer.exists():
            return None
        session_id = pointer.read_text(encoding="utf-8").strip()
        path = self._session_path(session_id)
        return _read_json(path) if path.exists() else None

    def export_learner_view(self, learner_id: str, book_id: str, expand: str | None = None) -> dict:
        graph = self.graph(book_id)
        model = self.get_model(learner_id, book_id)
        if expand is not None and expand not in graph:
            raise NotFound(f"unknown family {expand!r}")
        plan = planner.plan_session(
            graph, model, self.config.session_size, self.config.retirement_threshold
        )
        selected = set(plan.targets)
        session = self._active_session(learner_id, book_id)
        nodes = []
        for fid in graph.node_ids:
            family = graph.family(fid)
            mastery = model.mastery[fid]
            color = lm.mastery_color(mastery, model.is_touched(fid))
            node = {
                "id": fid,
                "label": family.representative.lemma,
                "mastery": mastery,
                "band": color.band,
                "selected": fid in selected,
            }
            if expand == fid:
                node["expanded"] = {
                    "members": [
                        {"lemma": m.lemma, "pos": m.pos, "level": family.member_levels[m]}
                        for m in sorted(family.members)
                    ]
                }
            nodes.append(node)
        return {
            "learner_id": learner_id,
            "book_id": book_id,
            "nodes": nodes,
            "edges": [
                {"a": e.a, "b": e.b, "weight": round(e.weight, 4)} for e in graph.edges
            ],
            "changed": list(session["last_changed"]) if session else [],
        }
