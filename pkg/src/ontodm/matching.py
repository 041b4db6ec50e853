"""Map extracted phrases onto ontology nodes.

Five tiers, first non-empty tier wins: exact label, lemma, synonym,
compound head, and embedding similarity on head words. Embedding matches
carry their cosine as score; all other tiers score 1.0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .nlu import Lexicon, lemmatize, split_compound
from .ontology import OntologyGraph

logger = logging.getLogger(__name__)

SIMILARITY_THRESHOLD = 0.65
AMBIGUITY_MARGIN = 0.05


class EmbeddingError(Exception):
    pass


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, tuple[float, ...]]

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def get(self, word: str) -> tuple[float, ...] | None:
        return self.vectors.get(word)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load the plain-text table: header `<count> <dimension>`, then one
    `word v1 .. vd` row per line. Vectors are unit-normalized on load."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise EmbeddingError("empty embedding file")
    header = lines[0].split()
    if len(header) != 2:
        raise EmbeddingError("header must be '<count> <dimension>'")
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError as exc:
        raise EmbeddingError(f"non-numeric header: {lines[0]!r}") from exc

    vectors: dict[str, tuple[float, ...]] = {}
    rows = 0
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        fields = line.split()
        word = fields[0]
        if len(fields) - 1 != dim:
            raise EmbeddingError(f"line {lineno}: expected {dim} values, got {len(fields) - 1}")
        try:
            values = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise EmbeddingError(f"line {lineno}: non-numeric field") from exc
        norm = math.sqrt(math.fsum(v * v for v in values))
        if norm == 0.0:
            raise EmbeddingError(f"line {lineno}: zero vector for '{word}'")
        if word in vectors:
            logger.warning("duplicate embedding for %r, keeping the last one", word)
        else:
            rows += 1
        vectors[word] = tuple(v / norm for v in values)
    if rows != count:
        raise EmbeddingError(f"header promises {count} words, file has {rows}")
    return EmbeddingTable(dimension=dim, vectors=vectors)


def cosine(u: tuple[float, ...] | list[float], v: tuple[float, ...] | list[float]) -> float:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    dot = math.fsum(a * b for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(a * a for a in u))
    nv = math.sqrt(math.fsum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


@dataclass(frozen=True)
class MatchResult:
    node_id: str
    tier: str  # exact | lemma | synonym | compound | embedding
    score: float
    matched_lemma: str


def _head_word(phrase: str) -> str:
    words = phrase.split()
    return words[-1] if words else phrase


def match_phrase(
    lex: Lexicon,
    graph: OntologyGraph,
    phrase: str,
    table: EmbeddingTable | None = None,
    threshold: float = SIMILARITY_THRESHOLD,
) -> list[MatchResult]:
    """Best-first matches of a phrase against all ontology nodes."""
    if not phrase.strip():
        return []
    normalized = " ".join(phrase.casefold().split())
    phrase_lemma = " ".join(lemmatize(lex, w) for w in normalized.split())

    # tier 1: exact normalized label
    hits = [
        node_id
        for node_id in graph.node_ids()
        if graph.node_label(node_id).casefold() == normalized
    ]
    if hits:
        return [MatchResult(n, "exact", 1.0, phrase_lemma) for n in sorted(hits)]

    # tier 2: lemma equality against label lemmas
    hits = [
        node_id
        for node_id in graph.node_ids()
        if graph.phrase_lemma(graph.node_label(node_id)) == phrase_lemma
    ]
    if hits:
        return [MatchResult(n, "lemma", 1.0, phrase_lemma) for n in sorted(hits)]

    # tier 3: synonym-list equality
    hits = sorted(set(graph.lemma_index.get(phrase_lemma, [])))
    if hits:
        return [MatchResult(n, "synonym", 1.0, phrase_lemma) for n in hits]

    # tier 4: compound head matched through tiers 1-3
    head = _head_word(normalized)
    parts = split_compound(lex, head)
    if len(parts) > 1:
        head_lemma = parts[-1]
        hits = sorted(set(graph.lemma_index.get(head_lemma, [])))
        if hits:
            return [MatchResult(n, "compound", 1.0, head_lemma) for n in hits]

    # tier 5: embedding similarity between head words
    if table is not None:
        query_vec = table.get(_head_word(normalized)) or table.get(lemmatize(lex, _head_word(normalized)))
        if query_vec is not None:
            scored: list[tuple[float, str]] = []
            for node_id in graph.node_ids():
                label_head = _head_word(graph.node_label(node_id).casefold())
                node_vec = table.get(label_head)
                if node_vec is None:
                    continue
                sim = cosine(query_vec, node_vec)
                if sim >= threshold:
                    scored.append((sim, node_id))
            scored.sort(key=lambda sn: (-sn[0], sn[1]))
            return [MatchResult(n, "embedding", s, _head_word(normalized)) for s, n in scored]
    return []


def is_ambiguous(results: list[MatchResult], margin: float = AMBIGUITY_MARGIN) -> bool:
    """Two embedding candidates within the margin cannot be told apart."""
    if len(results) < 2 or results[0].tier != "embedding":
        return False
    return results[0].score - results[1].score < margin
