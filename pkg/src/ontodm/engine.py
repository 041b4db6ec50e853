"""Engine assembly and session lifecycle.

All assets (ontology, lexicon, corpus, embeddings, templates) load once at
startup and stay immutable; each chat session owns one context object and
serializes its turns behind a per-session lock.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import matching, ranking
from .answer import AnswerEnvelope, AnswerGenerator, AnswerTemplates, compose, load_templates
from .context import (
    ContextObject,
    ResolutionOutcome,
    ResolverDeps,
    new_context,
    resolve,
    suggest_next,
)
from .matching import EmbeddingTable, load_embeddings
from .nlu import Lexicon, QueryObject, build_query, lemmatize, load_lexicon
from .ontology import OntologyGraph, graph_metrics, load_ontology
from .ranking import classify_intent, load_corpus, rank_keyphrases, train_bm25, train_intents

ASSETS_DIR = Path(__file__).parent / "assets"


class UnknownSessionError(KeyError):
    pass


@dataclass
class EngineConfig:
    ontology_path: Path = ASSETS_DIR / "ontology.json"
    lexicon_path: Path = ASSETS_DIR / "lexicon.tsv"
    corpus_path: Path = ASSETS_DIR / "corpus.txt"
    embeddings_path: Path | None = ASSETS_DIR / "embeddings.txt"
    templates_path: Path | None = ASSETS_DIR / "templates.txt"
    similarity_threshold: float = matching.SIMILARITY_THRESHOLD
    ambiguity_margin: float = matching.AMBIGUITY_MARGIN
    intent_threshold: float = ranking.INTENT_THRESHOLD
    port: int = 8000
    transcript_path: Path | None = None

    def validate(self) -> None:
        for label, path in (
            ("ontology", self.ontology_path),
            ("lexicon", self.lexicon_path),
            ("corpus", self.corpus_path),
            ("embeddings", self.embeddings_path),
            ("templates", self.templates_path),
        ):
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(f"{label} file not found: {path}")


@dataclass
class Turn:
    user_text: str
    queries: list[QueryObject]
    answer: AnswerEnvelope
    created_at: str

    def to_dict(self) -> dict:
        return {
            "user": self.user_text,
            "answer": self.answer.text,
            "outcome": self.answer.outcome.to_dict(),
            "state": self.answer.state,
            "created_at": self.created_at,
        }


@dataclass
class ChatSession:
    session_id: str
    context: ContextObject
    turns: list[Turn] = field(default_factory=list)
    created_at: str = ""
    updated_at: str = ""
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Engine:
    """The dialogue engine: loaded assets plus the in-memory session store."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.config.validate()

        self.lexicon: Lexicon = load_lexicon(self.config.lexicon_path)
        self.graph: OntologyGraph = load_ontology(
            self.config.ontology_path, lemmatize=lambda w: lemmatize(self.lexicon, w)
        )
        corpus = load_corpus(self.config.corpus_path)
        self.bm25 = train_bm25(self.lexicon, corpus)
        self.intents = train_intents(self.lexicon, corpus)
        self.embeddings: EmbeddingTable | None = (
            load_embeddings(self.config.embeddings_path) if self.config.embeddings_path else None
        )
        templates = (
            load_templates(self.config.templates_path)
            if self.config.templates_path
            else AnswerTemplates()
        )
        self.answerer = AnswerGenerator(templates, self.graph)
        self.deps = ResolverDeps(
            lexicon=self.lexicon,
            embeddings=self.embeddings,
            similarity_threshold=self.config.similarity_threshold,
            ambiguity_margin=self.config.ambiguity_margin,
            intent_products=ranking.intent_product_map(corpus),
        )

        self._sessions: dict[str, ChatSession] = {}
        self._store_lock = threading.Lock()

    # -- NLU helpers -------------------------------------------------------

    def parse_message(self, text: str) -> list[QueryObject]:
        return build_query(
            self.lexicon,
            text,
            rank_candidates=lambda cands: rank_keyphrases(self.bm25, cands),
            classify_intents=lambda t: classify_intent(self.intents, t),
        )

    # -- session lifecycle ---------------------------------------------------

    def create_session(self) -> str:
        session_id = secrets.token_hex(16)
        now = _now()
        with self._store_lock:
            self._sessions[session_id] = ChatSession(
                session_id=session_id, context=new_context(), created_at=now, updated_at=now
            )
        return session_id

    def get_session(self, session_id: str) -> ChatSession:
        with self._store_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(session_id)
        return session

    def session_state(self, session_id: str) -> dict:
        return self.get_session(session_id).context.snapshot()

    def session_transcript(self, session_id: str) -> list[dict]:
        session = self.get_session(session_id)
        with session.lock:
            return [turn.to_dict() for turn in session.turns]

    # -- message handling ------------------------------------------------------

    def respond(self, ctx: ContextObject, text: str) -> tuple[AnswerEnvelope, ContextObject, list[QueryObject]]:
        """Stateless turn: resolve every sentence of one message against ctx."""
        queries = self.parse_message(text)
        outcomes: list[ResolutionOutcome] = []
        answers: list[str] = []
        for i, query in enumerate(queries):
            outcome, ctx = resolve(ctx, query, self.graph, self.deps, advance=(i == 0))
            suggestion = (
                suggest_next(ctx, self.graph) if outcome.kind == "attribute_value" else None
            )
            outcomes.append(outcome)
            answers.append(self.answerer.generate(outcome, query, suggestion))
        if len(outcomes) == 1:
            outcome = outcomes[0]
        else:
            fired = next((o.fired_rule for o in outcomes if o.fired_rule != "none"), "none")
            outcome = ResolutionOutcome(kind="composite", fired_rule=fired, sub_outcomes=outcomes)
        envelope = AnswerEnvelope(text=compose(answers), outcome=outcome, state=ctx.snapshot())
        return envelope, ctx, queries

    def post_message(self, session_id: str, text: str) -> AnswerEnvelope:
        if not text or not text.strip():
            raise ValueError("empty message")
        session = self.get_session(session_id)
        with session.lock:
            envelope, new_ctx, queries = self.respond(session.context, text)
            session.context = new_ctx
            turn = Turn(user_text=text, queries=queries, answer=envelope, created_at=_now())
            session.turns.append(turn)
            session.updated_at = turn.created_at
            self._persist_turn(session, turn)
        return envelope

    def _persist_turn(self, session: ChatSession, turn: Turn) -> None:
        if self.config.transcript_path is None:
            return
        record = {"session_id": session.session_id, **turn.to_dict()}
        with open(self.config.transcript_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    # -- diagnostics --------------------------------------------------------------

    def metrics(self):
        return graph_metrics(self.graph)
