"""Family similarity from word vectors and the pruned domain-model graph.

Family-to-family weight is the maximum cosine over all member-vector pairs.
The graph keeps an edge when its weight clears the prune threshold and it
ranks among the top-k incident edges of at least one endpoint (ties at the
k-th rank all survive).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, ZeroVector
from .ingestion import LexicalUnit
from .morphology import WordFamily


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    vectors: Mapping[str, np.ndarray]

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word)

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.vectors)


def load_embeddings(path: str | Path, vocabulary: Iterable[str] | None = None) -> EmbeddingTable:
    """Read a plain-text vector file ("word f1 f2 ..." per line).

    ``vocabulary`` keeps memory bounded: only listed words are retained.
    """
    keep = frozenset(vocabulary) if vocabulary is not None else None
    vectors: dict[str, np.ndarray] = {}
    dimension = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                raise ParseError("expected 'word f1 f2 ...'", line_no)
            word = parts[0]
            if keep is not None and word not in keep:
                continue
            try:
                vec = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise ParseError(f"non-numeric component for {word!r}", line_no) from None
            if not np.all(np.isfinite(vec)):
                raise ParseError(f"non-finite component for {word!r}", line_no)
            if dimension == 0:
                dimension = vec.size
            elif vec.size != dimension:
                raise ParseError(f"dimension {vec.size} != {dimension}", line_no)
            vectors[word] = vec
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def cosine(v1: Sequence[float] | np.ndarray, v2: Sequence[float] | np.ndarray) -> float:
    a = np.asarray(v1, dtype=np.float64)
    b = np.asarray(v2, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(np.dot(a, b) / (na * nb))


def member_vector(
    unit: LexicalUnit,
    table: EmbeddingTable,
    surface_forms: Mapping[LexicalUnit, Sequence[str]] | None = None,
) -> np.ndarray | None:
    """Vector for a member: lemma first, then its surface forms as fallback."""
    vec = table.get(unit.lemma)
    if vec is not None:
        return vec
    for form in sorted(set((surface_forms or {}).get(unit, ()))):
        vec = table.get(form.lower())
        if vec is not None:
            return vec
    return None


def family_similarity(
    f1: WordFamily,
    f2: WordFamily,
    table: EmbeddingTable,
    surface_forms: Mapping[LexicalUnit, Sequence[str]] | None = None,
) -> float | None:
    """Max pairwise cosine over both families' members; None if no pair has vectors."""
    if f1.id == f2.id:
        raise ValueError("family_similarity needs two distinct families")
    v1 = [v for m in sorted(f1.members) if (v := member_vector(m, table, surface_forms)) is not None]
    v2 = [v for m in sorted(f2.members) if (v := member_vector(m, table, surface_forms)) is not None]
    if not v1 or not v2:
        return None
    best = None
    for a in v1:
        for b in v2:
            score = cosine(a, b)
            if best is None or score > best:
                best = score
    return best


@dataclass(frozen=True)
class GraphEdge:
    a: str
    b: str
    weight: float


class FamilyGraph:
    """Weighted undirected graph over word families (the domain model)."""

    def __init__(self, book_id: str, families: Iterable[WordFamily],
                 edges: Iterable[GraphEdge], tau: float, degree_cap: int):
        self.book_id = book_id
        self.families: dict[str, WordFamily] = {f.id: f for f in families}
        self.tau = tau
        self.degree_cap = degree_cap
        self._adjacency: dict[str, dict[str, float]] = {fid: {} for fid in self.families}
        normalized = []
        for e in edges:
            a, b = sorted((e.a, e.b))
            if a == b or a not in self.families or b not in self.families:
                raise ValueError(f"bad edge {e}")
            if b in self._adjacency[a]:
                raise ValueError(f"duplicate edge {a}-{b}")
            normalized.append(GraphEdge(a, b, e.weight))
            self._adjacency[a][b] = e.weight
            self._adjacency[b][a] = e.weight
        self.edges: tuple[GraphEdge, ...] = tuple(sorted(normalized, key=lambda e: (e.a, e.b)))

    def __contains__(self, family_id: str) -> bool:
        return family_id in self.families

    def __len__(self) -> int:
        return len(self.families)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.families))

    def neighbors(self, family_id: str) -> dict[str, float]:
        return self._adjacency[family_id]

    def edge_weight(self, a: str, b: str) -> float | None:
        return self._adjacency.get(a, {}).get(b)

    def family(self, family_id: str) -> WordFamily:
        return self.families[family_id]


def prune_and_cap(
    weighted_pairs: Mapping[tuple[str, str], float],
    tau: float,
    degree_cap: int,
) -> list[GraphEdge]:
    """Threshold then degree-cap a weighted pair map.

    Pairs below ``tau`` are dropped. Each node marks its ``degree_cap``
    strongest remaining incident edges, keeping all edges tied with the k-th;
    an edge survives when either endpoint marked it.
    """
    weight_of: dict[tuple[str, str], float] = {}
    for (a, b), weight in weighted_pairs.items():
        pair = (a, b) if a < b else (b, a)
        if pair in weight_of:
            raise ValueError(f"pair {pair} given twice")
        weight_of[pair] = weight
    incident: dict[str, list[tuple[float, tuple[str, str]]]] = {}
    for (a, b), weight in weight_of.items():
        if weight < tau:
            continue
        incident.setdefault(a, []).append((weight, (a, b)))
        incident.setdefault(b, []).append((weight, (a, b)))
    marked: set[tuple[str, str]] = set()
    for edges_of_node in incident.values():
        edges_of_node.sort(key=lambda e: -e[0])
        if len(edges_of_node) > degree_cap:
            cutoff = edges_of_node[degree_cap - 1][0]
            kept = [e for e in edges_of_node if e[0] >= cutoff]
        else:
            kept = edges_of_node
        marked.update(pair for _, pair in kept)
    return [GraphEdge(a, b, weight_of[(a, b)]) for a, b in sorted(marked)]


def build_graph(
    families: Iterable[WordFamily],
    table: EmbeddingTable,
    tau: float = 0.3,
    degree_cap: int = 5,
    book_id: str = "",
    surface_forms: Mapping[LexicalUnit, Sequence[str]] | None = None,
) -> FamilyGraph:
    """All-pairs family similarity, pruned at ``tau`` and degree-capped.

    An edge survives the cap when it is among the ``degree_cap`` highest
    weighted edges of either endpoint. Families without any vector become
    isolated nodes.
    """
    families = sorted(families, key=lambda f: f.id)
    if not families:
        raise ValueError("no families")
    if not (0.0 < tau < 1.0):
        raise ValueError("tau must be in (0, 1)")
    if degree_cap < 1:
        raise ValueError("degree_cap must be >= 1")

    # one vector per member (lemma, else surface fallback), stacked for one GEMM
    rows: list[np.ndarray] = []
    owner: list[int] = []
    for fi, fam in enumerate(families):
        for m in sorted(fam.members):
            vec = member_vector(m, table, surface_forms)
            if vec is not None:
                norm = float(np.linalg.norm(vec))
                if norm == 0.0:
                    raise ZeroVector(f"zero vector for {m.lemma!r}")
                rows.append(vec / norm)
                owner.append(fi)

    pairs: dict[tuple[str, str], float] = {}
    if rows:
        matrix = np.stack(rows)
        sims = matrix @ matrix.T
        covered = sorted(set(owner))
        # segment-max over member rows, then columns -> family x family max cosine
        starts = []
        seen = set()
        for i, fi in enumerate(owner):
            if fi not in seen:
                seen.add(fi)
                starts.append(i)
        fam_rows = np.maximum.reduceat(sims, starts, axis=0)
        weights = np.maximum.reduceat(fam_rows, starts, axis=1)
        np.fill_diagonal(weights, -np.inf)
        above = np.argwhere(np.triu(weights >= tau, k=1))
        for i, j in above:
            a = families[covered[i]].id
            b = families[covered[j]].id
            pairs[(a, b)] = float(weights[i, j])

    edges = prune_and_cap(pairs, tau, degree_cap)
    return FamilyGraph(book_id=book_id, families=families, edges=edges,
                       tau=tau, degree_cap=degree_cap)


# ---------------------------------------------------------------------------
# JSON export / import

def graph_to_json(graph: FamilyGraph) -> dict:
    return {
        "book_id": graph.book_id,
        "params": {"tau": graph.tau, "degree_cap": graph.degree_cap},
        "nodes": [
            {
                "id": fam.id,
                "representative": {"lemma": fam.representative.lemma, "pos": fam.representative.pos},
                "members": [
                    {"lemma": m.lemma, "pos": m.pos, "level": fam.member_levels[m]}
                    for m in sorted(fam.members)
                ],
            }
            for fam in (graph.family(fid) for fid in graph.node_ids)
        ],
        "edges": [
            {"a": e.a, "b": e.b, "weight": round(e.weight, 4)}
            for e in graph.edges
        ],
    }


def graph_from_json(doc: dict) -> FamilyGraph:
    families = []
    for node in doc["nodes"]:
        members = {LexicalUnit(m["lemma"], m["pos"]): int(m["level"]) for m in node["members"]}
        families.append(WordFamily(
            id=node["id"],
            representative=LexicalUnit(node["representative"]["lemma"], node["representative"]["pos"]),
            members=frozenset(members),
            member_levels=members,
        ))
    edges = [GraphEdge(e["a"], e["b"], float(e["weight"])) for e in doc["edges"]]
    return FamilyGraph(
        book_id=doc["book_id"],
        families=families,
        edges=edges,
        tau=float(doc["params"]["tau"]),
        degree_cap=int(doc["params"]["degree_cap"]),
    )
