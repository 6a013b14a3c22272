"""Per-learner mastery overlay on the family graph.

Every node starts at 0.5 (the model is uncertain). A graded response r in
{-1, +1} moves the answered family by m*alpha*r and spreads one hop to each
neighbor by m*beta*r*w, clamped into [0, 1]. The update log makes any model
state reproducible by replay.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import UnknownNode
from .semantics import FamilyGraph

DIRECT = "direct"
SPREAD = "spread"
YESNO = "yesno"

GREY = "grey"
YELLOW = "yellow"
GREEN = "green"
RED = "red"

YELLOW_HALF_WIDTH = 0.05


@dataclass(frozen=True)
class UpdateParams:
    alpha: float = 0.3
    beta: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.beta <= self.alpha <= 1.0):
            raise ValueError(f"need 0 < beta <= alpha <= 1, got alpha={self.alpha} beta={self.beta}")


@dataclass(frozen=True)
class UpdateEvent:
    timestamp: float
    family: str
    r: int
    kind: str  # direct | spread | yesno


@dataclass(frozen=True)
class LearnerModel:
    learner_id: str
    graph_ref: str
    params: UpdateParams
    mastery: Mapping[str, float]
    touched: Mapping[str, bool]
    update_log: tuple[UpdateEvent, ...]

    def is_touched(self, family: str) -> bool:
        return self.touched.get(family, False)


def init_model(graph: FamilyGraph, learner_id: str, params: UpdateParams | None = None) -> LearnerModel:
    """Fresh model: every node at 0.5, nothing touched."""
    return LearnerModel(
        learner_id=learner_id,
        graph_ref=graph.book_id,
        params=params or UpdateParams(),
        mastery={fid: 0.5 for fid in graph.node_ids},
        touched={fid: False for fid in graph.node_ids},
        update_log=(),
    )


def _clamp(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def apply_response(
    model: LearnerModel,
    graph: FamilyGraph,
    family: str,
    r: int,
    params: UpdateParams | None = None,
    kind: str = DIRECT,
    timestamp: float | None = None,
) -> LearnerModel:
    """Apply a graded response to ``family`` and spread one hop to neighbors.

    Returns a new model; the input model is left untouched.
    """
    if family not in graph:
        raise UnknownNode(family)
    if r not in (-1, 1):
        raise ValueError(f"r must be -1 or +1, got {r!r}")
    p = params or model.params
    ts = time.time() if timestamp is None else timestamp

    mastery = dict(model.mastery)
    touched = dict(model.touched)
    log = list(model.update_log)

    mastery[family] = _clamp(mastery[family] + mastery[family] * p.alpha * r)
    touched[family] = True
    log.append(UpdateEvent(ts, family, r, kind))
    for neighbor, weight in sorted(graph.neighbors(family).items()):
        mastery[neighbor] = _clamp(mastery[neighbor] + mastery[neighbor] * p.beta * r * weight)
        touched[neighbor] = True
        log.append(UpdateEvent(ts, neighbor, r, SPREAD))

    return replace(model, mastery=mastery, touched=touched, update_log=tuple(log))


def apply_yesno(
    model: LearnerModel,
    graph: FamilyGraph,
    family: str,
    known: bool,
    params: UpdateParams | None = None,
    timestamp: float | None = None,
) -> LearnerModel:
    """Yes/No warm-start answer: known counts as +1, unknown as -1."""
    return apply_response(model, graph, family, 1 if known else -1,
                          params=params, kind=YESNO, timestamp=timestamp)


def replay_log(
    graph: FamilyGraph,
    learner_id: str,
    events: Iterable[UpdateEvent],
    params: UpdateParams | None = None,
) -> LearnerModel:
    """Rebuild a model from scratch by replaying direct events.

    Spread entries are audit rows derived from direct updates; replaying the
    direct rows regenerates them, so the result matches the original model
    bit for bit.
    """
    model = init_model(graph, learner_id, params=params)
    for event in events:
        if event.kind == SPREAD:
            continue
        model = apply_response(model, graph, event.family, event.r,
                               kind=event.kind, timestamp=event.timestamp)
    return model


@dataclass(frozen=True)
class MasteryColor:
    band: str
    intensity: float  # 0..1 within the band


def mastery_color(m: float, touched: bool) -> MasteryColor:
    """Map a mastery score to its display band.

    Untouched nodes are grey; nodes that came back to the 0.5 neighborhood
    after updates are yellow; otherwise green scaling up to 1.0 or red
    scaling down to 0.0.
    """
    if not touched:
        return MasteryColor(GREY, 0.0)
    if 0.5 - YELLOW_HALF_WIDTH <= m <= 0.5 + YELLOW_HALF_WIDTH:
        return MasteryColor(YELLOW, 0.0)
    if m > 0.5 + YELLOW_HALF_WIDTH:
        return MasteryColor(GREEN, (m - (0.5 + YELLOW_HALF_WIDTH)) / (0.5 - YELLOW_HALF_WIDTH))
    return MasteryColor(RED, ((0.5 - YELLOW_HALF_WIDTH) - m) / (0.5 - YELLOW_HALF_WIDTH))


# ---------------------------------------------------------------------------
# persistence

def model_to_json(model: LearnerModel) -> dict:
    return {
        "learner_id": model.learner_id,
        "graph_ref": model.graph_ref,
        "params": {"alpha": model.params.alpha, "beta": model.params.beta},
        "mastery": dict(sorted(model.mastery.items())),
        "touched": dict(sorted(model.touched.items())),
        "update_log": [
            {"timestamp": e.timestamp, "family": e.family, "r": e.r, "kind": e.kind}
            for e in model.update_log
        ],
    }


def model_from_json(doc: dict) -> LearnerModel:
    return LearnerModel(
        learner_id=doc["learner_id"],
        graph_ref=doc["graph_ref"],
        params=UpdateParams(alpha=float(doc["params"]["alpha"]), beta=float(doc["params"]["beta"])),
        mastery={k: float(v) for k, v in doc["mastery"].items()},
        touched={k: bool(v) for k, v in doc["touched"].items()},
        update_log=tuple(
            UpdateEvent(float(e["timestamp"]), e["family"], int(e["r"]), e["kind"])
            for e in doc["update_log"]
        ),
    )
