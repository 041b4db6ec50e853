import pytest

from ontodm.engine import ASSETS_DIR, Engine
from ontodm.matching import load_embeddings
from ontodm.nlu import lemmatize, load_lexicon
from ontodm.ontology import load_ontology
from ontodm.ranking import load_corpus, train_bm25, train_intents


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(ASSETS_DIR / "lexicon.tsv")


@pytest.fixture(scope="session")
def graph(lexicon):
    return load_ontology(ASSETS_DIR / "ontology.json", lemmatize=lambda w: lemmatize(lexicon, w))


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(ASSETS_DIR / "corpus.txt")


@pytest.fixture(scope="session")
def bm25(lexicon, corpus):
    return train_bm25(lexicon, corpus)


@pytest.fixture(scope="session")
def intent_model(lexicon, corpus):
    return train_intents(lexicon, corpus)


@pytest.fixture(scope="session")
def embeddings():
    return load_embeddings(ASSETS_DIR / "embeddings.txt")


@pytest.fixture(scope="session")
def engine():
    return Engine()
