"""Ontology-driven dialogue engine for German banking and finance chat."""

from .answer import AnswerEnvelope, AnswerGenerator, compose
from .context import ContextObject, ResolutionOutcome, ResolverDeps, new_context, resolve, suggest_next
from .engine import Engine, EngineConfig
from .matching import EmbeddingTable, MatchResult, cosine, load_embeddings, match_phrase
from .nlu import Lexicon, QueryObject, Token, build_query, load_lexicon
from .ontology import (
    AttributeValue,
    GraphMetrics,
    OntologyGraph,
    bfs_under,
    graph_metrics,
    individuals_of,
    load_ontology,
    lookup_attribute,
    subclasses,
)
from .ranking import Bm25Model, IntentModel, classify_intent, rank_keyphrases, train_bm25, train_intents
from .replay import ReplayReport, replay_script

__version__ = "0.1.0"

__all__ = [
    "AnswerEnvelope",
    "AnswerGenerator",
    "AttributeValue",
    "Bm25Model",
    "ContextObject",
    "EmbeddingTable",
    "Engine",
    "EngineConfig",
    "GraphMetrics",
    "IntentModel",
    "Lexicon",
    "MatchResult",
    "OntologyGraph",
    "QueryObject",
    "ReplayReport",
    "ResolutionOutcome",
    "ResolverDeps",
    "Token",
    "bfs_under",
    "build_query",
    "classify_intent",
    "compose",
    "cosine",
    "graph_metrics",
    "individuals_of",
    "load_embeddings",
    "load_lexicon",
    "load_ontology",
    "lookup_attribute",
    "match_phrase",
    "new_context",
    "rank_keyphrases",
    "replay_script",
    "resolve",
    "subclasses",
    "suggest_next",
    "train_bm25",
    "train_intents",
]
