"""Keyphrase ranking (Okapi BM25) and intent classification, both trained
from the synonyms corpus file.

Documents are whole corpus entries: lemmas of the canonical question, its
paraphrases and its gold keyphrases. A candidate keyphrase scores as its
best BM25 match over all entries. The intent classifier is a multiclass
averaged perceptron over character n-grams and word unigrams.
"""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .nlu import Lexicon, lemmatize, tokenize

DEFAULT_K1 = 1.5
DEFAULT_B = 0.75
MAX_KEYPHRASES = 5
INTENT_THRESHOLD = 0.30
NGRAM_RANGE = (3, 5)
TRAIN_EPOCHS = 10
TRAIN_SEED = 13


class CorpusError(Exception):
    pass


@dataclass
class SynonymEntry:
    entry_id: str
    canonical_question: str
    paraphrases: list[str]
    gold_keyphrases: list[str]
    intent_label: str
    product: str | None = None


def load_corpus(path: str | Path) -> list[SynonymEntry]:
    """Parse the blank-line-separated corpus format:

    canonical question, `intent: <label>`, optional `product: <class-id>`,
    `keyphrases: a, b, c`, then one paraphrase per line.
    """
    blocks: list[list[str]] = [[]]
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line.startswith("//"):
            continue
        if not line:
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append(line)
    if blocks and not blocks[-1]:
        blocks.pop()

    entries: list[SynonymEntry] = []
    for n, block in enumerate(blocks, 1):
        if len(block) < 2:
            raise CorpusError(f"entry {n}: needs a question and an intent line")
        canonical = block[0]
        intent = None
        product = None
        keyphrases: list[str] = []
        paraphrases: list[str] = []
        for line in block[1:]:
            if line.startswith("intent:"):
                intent = line.split(":", 1)[1].strip()
            elif line.startswith("product:"):
                product = line.split(":", 1)[1].strip()
            elif line.startswith("keyphrases:"):
                keyphrases = [p.strip() for p in line.split(":", 1)[1].split(",") if p.strip()]
            else:
                paraphrases.append(line.rstrip("?").strip() + ("?" if line.endswith("?") else ""))
        if not intent:
            raise CorpusError(f"entry {n}: missing 'intent:' line")
        entries.append(
            SynonymEntry(
                entry_id=f"e{n:03d}",
                canonical_question=canonical,
                paraphrases=paraphrases,
                gold_keyphrases=keyphrases,
                intent_label=intent,
                product=product,
            )
        )
    if not entries:
        raise CorpusError("corpus file contains no entries")
    return entries


def intent_product_map(corpus: list[SynonymEntry]) -> dict[str, str]:
    return {e.intent_label: e.product for e in corpus if e.product}


def _terms(lex: Lexicon, text: str) -> list[str]:
    return [lemmatize(lex, w) for w in tokenize(text) if any(c.isalnum() for c in w)]


@dataclass
class Bm25Model:
    doc_term_freqs: list[Counter]
    doc_lengths: list[int]
    avg_doc_length: float
    idf: dict[str, float]
    k1: float
    b: float
    lexicon: Lexicon


def train_bm25(lex: Lexicon, corpus: list[SynonymEntry], k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> Bm25Model:
    if not corpus:
        raise CorpusError("cannot train BM25 on an empty corpus")
    docs: list[list[str]] = []
    for entry in corpus:
        text_parts = [entry.canonical_question, *entry.paraphrases, *entry.gold_keyphrases]
        docs.append(_terms(lex, " ".join(text_parts)))
    n = len(docs)
    freqs = [Counter(d) for d in docs]
    lengths = [len(d) for d in docs]
    avg_len = sum(lengths) / n
    df: Counter = Counter()
    for tf in freqs:
        df.update(tf.keys())
    idf = {t: math.log((n - d + 0.5) / (d + 0.5) + 1) for t, d in df.items()}
    return Bm25Model(freqs, lengths, avg_len, idf, k1, b, lex)


def bm25_score(model: Bm25Model, terms: list[str], doc_index: int) -> float:
    tf = model.doc_term_freqs[doc_index]
    dl = model.doc_lengths[doc_index]
    norm = model.k1 * (1 - model.b + model.b * dl / model.avg_doc_length)
    score = 0.0
    for t in terms:
        f = tf.get(t, 0)
        if f == 0:
            continue
        score += model.idf[t] * f * (model.k1 + 1) / (f + norm)
    return score


def score_phrase(model: Bm25Model, phrase: str) -> float:
    """A candidate's score is its maximum BM25 score over all documents."""
    terms = _terms(model.lexicon, phrase)
    if not terms:
        return 0.0
    return max(bm25_score(model, terms, i) for i in range(len(model.doc_term_freqs)))


def rank_keyphrases(model: Bm25Model, candidates: list[str]) -> list[tuple[str, float]]:
    """Candidates sorted by score (ties alphabetical), zero scores dropped,
    at most MAX_KEYPHRASES kept."""
    scored = [(phrase, score_phrase(model, phrase)) for phrase in candidates]
    kept = [(p, s) for p, s in scored if s > 0.0]
    kept.sort(key=lambda ps: (-ps[1], ps[0]))
    return kept[:MAX_KEYPHRASES]


# -- intent classifier ---------------------------------------------------


@dataclass
class IntentModel:
    labels: list[str]
    weights: dict[str, dict[str, float]]
    lexicon: Lexicon = field(repr=False, default=None)


def _features(lex: Lexicon, text: str) -> Counter:
    terms = _terms(lex, text)
    feats: Counter = Counter()
    for term in terms:
        feats[f"w:{term}"] += 1
    joined = " ".join(terms)
    padded = f" {joined} "
    lo, hi = NGRAM_RANGE
    for n in range(lo, hi + 1):
        for i in range(len(padded) - n + 1):
            feats[f"c{n}:{padded[i:i + n]}"] += 1
    return feats


def _score_all(labels: list[str], by_feature: dict[str, dict[str, float]], feats: Counter) -> dict[str, float]:
    scores = dict.fromkeys(labels, 0.0)
    for f, count in feats.items():
        for label, w in by_feature.get(f, {}).items():
            scores[label] += w * count
    return scores


def train_intents(lex: Lexicon, corpus: list[SynonymEntry]) -> IntentModel:
    """Averaged perceptron, fixed epoch count and shuffle seed."""
    labels = sorted({e.intent_label for e in corpus})
    if len(labels) < 2:
        raise CorpusError("intent training needs at least two distinct labels")
    examples = []
    for entry in corpus:
        for text in [entry.canonical_question, *entry.paraphrases]:
            examples.append((_features(lex, text), entry.intent_label))

    # weights indexed feature-first: scoring only touches labels that have
    # ever seen the feature
    weights: dict[str, dict[str, float]] = defaultdict(dict)
    totals: dict[str, dict[str, float]] = defaultdict(dict)
    stamps: dict[str, dict[str, int]] = defaultdict(dict)
    rng = random.Random(TRAIN_SEED)
    step = 0

    def bump(label: str, feats: Counter, delta: float) -> None:
        for f, count in feats.items():
            row, trow, srow = weights[f], totals[f], stamps[f]
            w = row.get(label, 0.0)
            trow[label] = trow.get(label, 0.0) + (step - srow.get(label, 0)) * w
            srow[label] = step
            row[label] = w + delta * count

    order = list(range(len(examples)))
    for _ in range(TRAIN_EPOCHS):
        rng.shuffle(order)
        for idx in order:
            feats, gold = examples[idx]
            step += 1
            scores = _score_all(labels, weights, feats)
            pred = min(scores, key=lambda l: (-scores[l], l))
            if pred != gold:
                bump(gold, feats, +1.0)
                bump(pred, feats, -1.0)

    averaged: dict[str, dict[str, float]] = {label: {} for label in labels}
    for f, row in weights.items():
        for label, w in row.items():
            total = totals[f].get(label, 0.0) + (step - stamps[f].get(label, 0)) * w
            value = total / step
            if value != 0.0:
                averaged[label][f] = value
    return IntentModel(labels=labels, weights=averaged, lexicon=lex)


def classify_intent(model: IntentModel, text: str) -> list[tuple[str, float]]:
    """Softmax-normalized label confidences at or above the threshold,
    best first; empty when nothing clears it."""
    feats = _features(model.lexicon, text) if text.strip() else Counter()
    if not feats:
        return []
    scores = {
        label: sum(w.get(f, 0.0) * count for f, count in feats.items())
        for label, w in model.weights.items()
    }
    peak = max(scores.values())
    exps = {label: math.exp(s - peak) for label, s in scores.items()}
    z = sum(exps.values())
    confidences = [(label, exps[label] / z) for label in model.labels]
    confidences.sort(key=lambda lc: (-lc[1], lc[0]))
    return [(l, c) for l, c in confidences if c >= INTENT_THRESHOLD]
