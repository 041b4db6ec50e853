"""German NLU front end: turns raw user text into structured query objects.

Shallow and lexicon-driven by design: lookup lemmatization with a suffix
fallback, umlaut restoration gated on the lexicon, greedy compound splitting,
and span-based phrase extraction. No external models.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

UMLAUT_MAP = {"a": "ä", "o": "ö", "u": "ü"}
LINKING_ELEMENTS = ("s", "n", "es", "en", "")
SUFFIX_FALLBACKS = ("en", "n", "e", "s", "es", "er", "st", "t")

# personal-pronoun surfaces used for agent detection only
_SECOND_PERSON = {"sie", "du", "ihr", "ihnen", "dir", "dich", "euch"}
_FIRST_PERSON = {"ich", "wir"}
_AUX_VERBS = {"sein", "haben", "werden", "können", "mögen", "müssen", "sollen", "wollen", "dürfen"}
# separable verb particles joined back onto a clause-final verb
_VERB_PARTICLES = {"an", "auf", "ab", "aus", "ein", "mit", "nach", "vor", "zu", "zurück", "weiter", "um"}

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
_TOKEN_RE = re.compile(r"\d+(?:,\d+)+|[\wäöüÄÖÜß]+(?:-[\wäöüÄÖÜß]+)*|[^\s\w]", re.UNICODE)
_PUNCT_RE = re.compile(r"[^\wäöüÄÖÜß]+$")


class LexiconError(Exception):
    pass


@dataclass
class Lexicon:
    """In-memory banking/finance lexicon loaded from the TSV asset."""

    lemma_table: dict[str, str] = field(default_factory=dict)
    pos_table: dict[str, str] = field(default_factory=dict)
    compound_heads: set[str] = field(default_factory=set)
    linking_elements: tuple[str, ...] = LINKING_ELEMENTS
    demonstratives: set[str] = field(default_factory=set)
    interrogatives: set[str] = field(default_factory=set)
    question_words: set[str] = field(default_factory=set)
    greeting_phrases: dict[str, str] = field(default_factory=dict)  # phrase -> opening|closing
    chitchat_phrases: set[str] = field(default_factory=set)
    action_verbs: set[str] = field(default_factory=set)
    umlaut_map: dict[str, str] = field(default_factory=lambda: dict(UMLAUT_MAP))

    def knows(self, word: str) -> bool:
        return word in self.lemma_table or word in self.pos_table

    def is_noun(self, word: str) -> bool:
        lemma = self.lemma_table.get(word, word)
        return self.pos_table.get(lemma) == "noun"


def load_lexicon(path: str | Path) -> Lexicon:
    """Parse the sectioned TSV lexicon file. `//` lines are comments."""
    lex = Lexicon()
    section = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("//"):
            continue
        if line.startswith("#"):
            section = line.strip().lstrip("#").strip()
            continue
        if section is None:
            raise LexiconError(f"line {lineno}: record before any section header")
        cols = line.split("\t")
        if section == "lemma":
            if len(cols) != 2:
                raise LexiconError(f"line {lineno}: expected surface<TAB>lemma")
            lex.lemma_table[cols[0].strip()] = cols[1].strip()
        elif section == "pos":
            if len(cols) != 2:
                raise LexiconError(f"line {lineno}: expected lemma<TAB>tag")
            lex.pos_table[cols[0].strip()] = cols[1].strip()
        elif section == "heads":
            lex.compound_heads.add(cols[0].strip())
        elif section == "pronouns":
            if len(cols) != 2 or cols[1].strip() not in ("demonstrative", "interrogative"):
                raise LexiconError(f"line {lineno}: expected surface<TAB>demonstrative|interrogative")
            if cols[1].strip() == "demonstrative":
                lex.demonstratives.add(cols[0].strip())
            else:
                lex.interrogatives.add(cols[0].strip())
        elif section == "qwords":
            lex.question_words.add(cols[0].strip())
        elif section == "greetings":
            if len(cols) != 2 or cols[1].strip() not in ("opening", "closing"):
                raise LexiconError(f"line {lineno}: expected phrase<TAB>opening|closing")
            lex.greeting_phrases[cols[0].strip()] = cols[1].strip()
        elif section == "chitchat":
            lex.chitchat_phrases.add(cols[0].strip())
        elif section == "actionverbs":
            lex.action_verbs.add(cols[0].strip())
        else:
            raise LexiconError(f"line {lineno}: unknown section '#{section}'")
    if not lex.lemma_table or not lex.pos_table:
        raise LexiconError("lexicon must define #lemma and #pos sections")
    return lex


@dataclass
class Token:
    surface: str
    normalized: str
    lemma: str
    pos_tag: str
    compound_parts: list[str]

    @property
    def is_punct(self) -> bool:
        return self.pos_tag == "punct"


@dataclass
class QueryObject:
    """Semantic/syntactic parse of one user sentence."""

    sentence: str
    sentence_type: str  # Greeting | Chitchat | Action | Ordinary
    type_attr: str  # question | statement
    qtype: str | None = None  # yesno_q | wh_q | misc (questions only)
    qword: str | None = None
    agent: str | None = None  # 1st | 2nd | 3rd | no
    gtype: str | None = None  # opening | closing (greetings only)
    intents: list[str] = field(default_factory=list)
    kphrases: list[str] = field(default_factory=list)
    noun_phrases: list[str] = field(default_factory=list)
    verb_phrases: list[str] = field(default_factory=list)
    pos_tags: str = ""
    length: int = 0
    is_uninformative: bool = False
    tokens: list[Token] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sentence": self.sentence,
            "sentence_type": self.sentence_type,
            "type_attr": self.type_attr,
            "qtype": self.qtype,
            "qword": self.qword,
            "agent": self.agent,
            "gtype": self.gtype,
            "intents": list(self.intents),
            "kphrases": list(self.kphrases),
            "noun_phrases": list(self.noun_phrases),
            "verb_phrases": list(self.verb_phrases),
            "pos_tags": self.pos_tags,
            "length": self.length,
            "is_uninformative": self.is_uninformative,
        }


def _restore_word(lex: Lexicon, word: str) -> str:
    """Rewrite a plain-vowel word to its umlauted form when only the
    umlauted variant is known to the lexicon."""
    if lex.knows(word):
        return word
    positions = [i for i, ch in enumerate(word) if ch in lex.umlaut_map]
    if not positions or len(positions) > 6:
        return word
    # try fewer replacements first, positions left to right
    for size in range(1, len(positions) + 1):
        for combo in _combinations(positions, size):
            chars = list(word)
            for i in combo:
                chars[i] = lex.umlaut_map[chars[i]]
            candidate = "".join(chars)
            if lex.knows(candidate):
                return candidate
    return word


def _combinations(items: list[int], size: int):
    import itertools

    return itertools.combinations(items, size)


def normalize(lex: Lexicon, text: str) -> str:
    """Trim, collapse whitespace, casefold, restore umlauts. Idempotent."""
    collapsed = " ".join(text.split())
    folded = collapsed.casefold()
    return re.sub(r"[\wäöü]+", lambda m: _restore_word(lex, m.group(0)), folded)


def segment(text: str) -> list[str]:
    """Split a message into sentences on terminal punctuation."""
    stripped = text.strip()
    if not stripped:
        return []
    return [s for s in _SENTENCE_SPLIT.split(stripped) if s.strip()]


def tokenize(sentence: str) -> list[str]:
    return _TOKEN_RE.findall(sentence)


def lemmatize(lex: Lexicon, surface: str) -> str:
    """Lexicon lookup with a small suffix-stripping fallback."""
    word = normalize(lex, surface)
    if word in lex.lemma_table:
        return lex.lemma_table[word]
    if word in lex.pos_table:
        return word
    for suffix in SUFFIX_FALLBACKS:
        if word.endswith(suffix) and len(word) > len(suffix) + 2:
            stem = word[: -len(suffix)]
            if stem in lex.pos_table:
                return stem
            if stem in lex.lemma_table:
                return lex.lemma_table[stem]
            if (stem + "en") in lex.pos_table:
                return stem + "en"
    return word


def split_compound(lex: Lexicon, word: str) -> list[str]:
    """Greedy longest-known-head decomposition of a German compound.

    Works on the lemmatized form; the last constituent must be a known
    compound head and each constituent must rebuild its surface chunk as
    lemma plus at most one linking element, so splits always reassemble.
    Unsplittable words come back as a singleton of their lemma.
    """
    base = lemmatize(lex, normalize(lex, word))
    parts = _split_rec(lex, base, is_head=True)
    return parts if parts is not None else [base]


def _split_rec(lex: Lexicon, word: str, is_head: bool) -> list[str] | None:
    # longest known noun that properly suffixes the word, head-qualified at
    # the top level; an inflected tail cannot rebuild, so it must be a lemma
    for cut in range(1, len(word) - 2):
        suffix = word[cut:]
        if not lex.is_noun(suffix):
            continue
        if lemmatize(lex, suffix) != suffix:
            continue
        if is_head and suffix not in lex.compound_heads:
            continue
        rest = _split_prefix(lex, word[:cut])
        if rest is not None:
            return rest + [suffix]
    return None


def _split_prefix(lex: Lexicon, prefix: str) -> list[str] | None:
    for linker in LINKING_ELEMENTS:
        if linker and not prefix.endswith(linker):
            continue
        candidate = prefix[: len(prefix) - len(linker)] if linker else prefix
        if len(candidate) < 3 or not lex.is_noun(candidate):
            continue
        lemma = lemmatize(lex, candidate)
        if candidate != lemma:
            # the surface delta itself must act as the linking element
            if linker or not any(candidate == lemma + le for le in LINKING_ELEMENTS if le):
                continue
        deeper = _split_rec(lex, lemma, is_head=False)
        return deeper if deeper is not None else [lemma]
    return None


def annotate(lex: Lexicon, sentence: str) -> list[Token]:
    """Tokenize and tag one sentence: normalization, lemma, shallow POS."""
    surfaces = tokenize(sentence)
    tokens: list[Token] = []
    for surface in surfaces:
        if _PUNCT_RE.fullmatch(surface):
            tokens.append(Token(surface, surface, surface, "punct", [surface]))
            continue
        norm = normalize(lex, surface)
        lemma = lemmatize(lex, norm)
        pos = lex.pos_table.get(lemma)
        if pos is None:
            if re.fullmatch(r"[\d,.]+", norm):
                pos = "other"
            elif surface[:1].isupper():
                pos = "noun"  # German orthography: capitalized unknown -> noun
            else:
                pos = "other"
        parts = split_compound(lex, norm) if pos == "noun" else [lemma]
        tokens.append(Token(surface, norm, lemma, pos, parts))

    # article/demonstrative disambiguation: der/die/das etc. are determiners
    # only when a noun (optionally through adjectives) follows
    for i, tok in enumerate(tokens):
        if tok.normalized not in lex.demonstratives:
            continue
        j = i + 1
        while j < len(tokens) and tokens[j].pos_tag == "adjective":
            j += 1
        if j < len(tokens) and tokens[j].pos_tag == "noun":
            tok.pos_tag = "determiner"
        else:
            tok.pos_tag = "pronoun-demonstrative"
    return tokens


def _word_sequence(tokens: list[Token]) -> list[Token]:
    return [t for t in tokens if not t.is_punct]


def classify_sentence(
    lex: Lexicon, tokens: list[Token]
) -> tuple[str, str, str | None, str | None, str | None, str | None]:
    """Assign (sentence_type, type_attr, qtype, qword, agent, gtype)."""
    words = _word_sequence(tokens)
    if not words:
        raise ValueError("cannot classify an empty sentence")
    joined = " ".join(t.normalized for t in words)

    if joined in lex.greeting_phrases:
        return "Greeting", "statement", None, None, None, lex.greeting_phrases[joined]
    if joined in lex.chitchat_phrases:
        return "Chitchat", "statement", None, None, None, None

    sentence_type = "Ordinary"
    if any(t.lemma in lex.action_verbs for t in words if t.pos_tag == "verb"):
        sentence_type = "Action"

    first = words[0]
    ends_question = tokens[-1].surface == "?"
    starts_qword = first.normalized in lex.question_words
    starts_verb = first.pos_tag == "verb"
    is_question = ends_question or starts_qword or (starts_verb and len(words) > 1)

    qtype = qword = None
    if is_question:
        if starts_qword:
            qtype, qword = "wh_q", first.normalized
        elif starts_verb:
            qtype, qword = "yesno_q", first.normalized
        else:
            qtype = "misc"

    surfaces = {t.normalized for t in words}
    if surfaces & _SECOND_PERSON:
        agent = "2nd"
    elif surfaces & _FIRST_PERSON:
        agent = "1st"
    elif sentence_type == "Action" and any(t.pos_tag == "noun" for t in words):
        agent = "3rd"
    else:
        agent = "no"

    return sentence_type, "question" if is_question else "statement", qtype, qword, agent, None


def extract_phrases(lex: Lexicon, tokens: list[Token]) -> tuple[list[str], list[str], list[str]]:
    """Noun phrases, verb phrases and keyphrase candidates from tagged tokens.

    Noun phrases are (determiner? adjective* noun+) spans emitted as the
    normalized noun words; verb phrases are contiguous verb runs with a
    clause-final separable particle folded back in.
    """
    noun_phrases: list[str] = []
    np_end_index: list[int] = []
    i = 0
    while i < len(tokens):
        j = i
        if j < len(tokens) and tokens[j].pos_tag == "determiner":
            j += 1
        while j < len(tokens) and tokens[j].pos_tag == "adjective":
            j += 1
        if j < len(tokens) and tokens[j].pos_tag == "noun":
            start_nouns = j
            while j < len(tokens) and tokens[j].pos_tag == "noun":
                j += 1
            noun_phrases.append(" ".join(t.normalized for t in tokens[start_nouns:j]))
            np_end_index.append(j)
            i = j
        else:
            i += 1

    verb_phrases: list[str] = []
    vp_start_index: list[int] = []
    i = 0
    while i < len(tokens):
        if tokens[i].pos_tag == "verb":
            start = i
            while i < len(tokens) and tokens[i].pos_tag == "verb":
                i += 1
            lemmas = [t.lemma for t in tokens[start:i]]
            # separable verb: clause-final particle reattaches to the verb
            words = _word_sequence(tokens)
            if words and words[-1].normalized in _VERB_PARTICLES and len(lemmas) == 1:
                joined = words[-1].normalized + lemmas[0]
                if lex.pos_table.get(joined) == "verb":
                    lemmas = [joined]
            verb_phrases.append(" ".join(lemmas))
            vp_start_index.append(start)
        else:
            i += 1

    candidates = list(noun_phrases)
    for np, np_end in zip(noun_phrases, np_end_index):
        for vp, vp_start in zip(verb_phrases, vp_start_index):
            if vp_start >= np_end:
                candidates.append(f"{np} {vp}")
                break
    return noun_phrases, verb_phrases, candidates


def main_verb_lemmas(lex: Lexicon, tokens: list[Token]) -> list[str]:
    """Content-verb lemmas of the sentence (auxiliaries and modals dropped
    when a fuller verb exists)."""
    aux = {"sein", "haben", "werden", "können", "mögen", "müssen", "sollen", "wollen", "dürfen"}
    verbs = [t.lemma for t in tokens if t.pos_tag == "verb"]
    content = [v for v in verbs if v not in aux]
    return content if content else verbs


def build_query(
    lex: Lexicon,
    text: str,
    rank_candidates=None,
    classify_intents=None,
) -> list[QueryObject]:
    """Full front-end pipeline; one QueryObject per sentence.

    `rank_candidates` and `classify_intents` are optional callables supplied
    by the ranking module; greetings and chitchat skip both.
    """
    if not text or not text.strip():
        raise ValueError("empty message")
    queries: list[QueryObject] = []
    for sentence in segment(text):
        tokens = annotate(lex, sentence)
        words = _word_sequence(tokens)
        if not words:
            continue
        stype, type_attr, qtype, qword, agent, gtype = classify_sentence(lex, tokens)
        query = QueryObject(
            sentence=sentence,
            sentence_type=stype,
            type_attr=type_attr,
            qtype=qtype,
            qword=qword,
            agent=agent,
            gtype=gtype,
            pos_tags=" ".join(t.pos_tag for t in tokens),
            length=len(words),
            tokens=tokens,
        )
        if stype in ("Greeting", "Chitchat"):
            query.is_uninformative = True
            queries.append(query)
            continue
        nps, vps, candidates = extract_phrases(lex, tokens)
        query.noun_phrases = nps
        query.verb_phrases = vps
        if rank_candidates is not None and candidates:
            query.kphrases = [phrase for phrase, _ in rank_candidates(candidates)]
        if classify_intents is not None:
            query.intents = [label for label, _ in classify_intents(query.sentence)]
        query.is_uninformative = not query.kphrases and not nps
        queries.append(query)
    if not queries:
        raise ValueError("empty message")
    return queries
