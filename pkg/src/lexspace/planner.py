"""Central-node session planning over the family graph.

Closeness centrality in the Wasserman-Faust form stays well defined on the
disconnected graphs that pruning produces: with R the set of nodes reachable
from u and n the total node count,

    score(u) = (|R| / (n - 1)) * (|R| / sum of hop distances to R)

Sessions take the most central not-yet-mastered families, skipping anything
adjacent to an already selected target.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass

from .errors import UnknownNode
from .learner_model import LearnerModel
from .semantics import FamilyGraph


@dataclass(frozen=True)
class CentralityScore:
    family: str
    score: float


@dataclass(frozen=True)
class SessionPlan:
    session_id: str
    targets: tuple[str, ...]
    created_from: str


def _bfs_distances(graph: FamilyGraph, start: str) -> dict[str, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for neighbor in graph.neighbors(node):
            if neighbor not in dist:
                dist[neighbor] = dist[node] + 1
                queue.append(neighbor)
    return dist


def closeness(graph: FamilyGraph, node: str) -> float:
    """Wasserman-Faust closeness by unweighted hop distance; isolated -> 0."""
    if node not in graph:
        raise UnknownNode(node)
    n = len(graph)
    if n <= 1:
        return 0.0
    dist = _bfs_distances(graph, node)
    reachable = len(dist) - 1
    if reachable == 0:
        return 0.0
    total = sum(dist.values())
    return (reachable / (n - 1)) * (reachable / total)


def closeness_scores(graph: FamilyGraph) -> dict[str, float]:
    """All-node closeness, computed once per graph and cached on it."""
    cached = getattr(graph, "_closeness_cache", None)
    if cached is None:
        cached = {fid: closeness(graph, fid) for fid in graph.node_ids}
        graph._closeness_cache = cached
    return cached


def _ranked(graph: FamilyGraph) -> list[str]:
    scores = closeness_scores(graph)
    return sorted(scores, key=lambda fid: (-scores[fid], fid))


def _plan_id(graph: FamilyGraph, snapshot: str, targets: tuple[str, ...]) -> str:
    digest = hashlib.sha256(("\n".join(targets) + snapshot + graph.book_id).encode()).hexdigest()
    return f"plan-{digest[:12]}"


def _greedy_select(graph: FamilyGraph, candidates: list[str], size: int) -> tuple[str, ...]:
    selected: list[str] = []
    for fid in candidates:
        if len(selected) >= size:
            break
        if any(other in graph.neighbors(fid) for other in selected):
            continue
        selected.append(fid)
    return tuple(selected)


def plan_session(
    graph: FamilyGraph,
    model: LearnerModel,
    session_size: int = 20,
    retirement: float = 0.8,
) -> SessionPlan:
    """Top central families below the retirement threshold, pairwise non-adjacent."""
    eligible = [fid for fid in _ranked(graph) if model.mastery.get(fid, 0.5) < retirement]
    targets = _greedy_select(graph, eligible, session_size)
    snapshot = f"{model.learner_id}@{len(model.update_log)}"
    return SessionPlan(
        session_id=_plan_id(graph, snapshot, targets),
        targets=targets,
        created_from=snapshot,
    )


def plan_warmstart(graph: FamilyGraph, model: LearnerModel, test_size: int) -> tuple[str, ...]:
    """Yes/No checklist: the session selection with no retirement filter."""
    return _greedy_select(graph, _ranked(graph), test_size)


def centrality_table(graph: FamilyGraph) -> list[CentralityScore]:
    scores = closeness_scores(graph)
    return [CentralityScore(fid, scores[fid]) for fid in sorted(scores, key=lambda f: (-scores[f], f))]
