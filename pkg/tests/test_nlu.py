import random

import pytest

from ontodm.nlu import (
    annotate,
    build_query,
    classify_sentence,
    extract_phrases,
    lemmatize,
    normalize,
    segment,
    split_compound,
    tokenize,
)

from .oracles import can_reassemble, random_word


# -- normalize ---------------------------------------------------------------


def test_umlaut_restoration(lexicon):
    assert normalize(lexicon, "uber") == "über"
    assert normalize(lexicon, "fur") == "für"
    assert normalize(lexicon, "konnen") == "können"


def test_normalize_idempotent_on_restored(lexicon):
    assert normalize(lexicon, "über") == "über"


def test_normalize_known_plain_word_untouched(lexicon):
    # "schon" is a real word; the lexicon gate must not rewrite it
    assert normalize(lexicon, "schon") == "schon"


def test_normalize_casefold_only(lexicon):
    assert normalize(lexicon, "Internetbestellung") == "internetbestellung"


def test_normalize_idempotent_random(lexicon):
    rng = random.Random(7)
    for _ in range(300):
        text = " ".join(random_word(rng, rng.randint(1, 3)) for _ in range(rng.randint(1, 6)))
        once = normalize(lexicon, text)
        assert normalize(lexicon, once) == once


# -- segment / tokenize --------------------------------------------------------


def test_segment_two_questions():
    text = "Sind meine Unterlagen schon bei Ihnen eingegangen? Falls ja, wo erfahre ich den aktuellen Bearbeitungsstand?"
    assert len(segment(text)) == 2


def test_segment_single_sentence():
    assert segment("Hallo") == ["Hallo"]


def test_segment_terminators_kept():
    assert segment("A. B. C.") == ["A.", "B.", "C."]


def test_tokenize_question():
    assert tokenize("Was kostet die?") == ["Was", "kostet", "die", "?"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_decimal_comma():
    assert tokenize("0,23 %") == ["0,23", "%"]


# -- lemmatize ------------------------------------------------------------------


def test_lemmatize_verb_form(lexicon):
    assert lemmatize(lexicon, "kostet") == "kosten"


def test_lemmatize_fixpoint(lexicon):
    assert lemmatize(lexicon, "kosten") == "kosten"


def test_lemmatize_plural_noun(lexicon):
    # frozen from the bundled lemma table
    assert lemmatize(lexicon, "Unterlagen") == "unterlage"


def test_lemmatize_unknown_identity(lexicon):
    assert lemmatize(lexicon, "blorp") == "blorp"


# -- split_compound ----------------------------------------------------------------


def test_split_compound_two_parts(lexicon):
    assert split_compound(lexicon, "Internetbestellung") == ["internet", "bestellung"]


def test_split_compound_simple_word(lexicon):
    assert split_compound(lexicon, "Kredit") == ["kredit"]


def test_split_compound_three_parts_with_linking(lexicon):
    assert split_compound(lexicon, "Zahlungsverkehrsraum") == ["zahlung", "verkehr", "raum"]


def test_split_compound_head_position(lexicon):
    for word in ["Internetbestellung", "Telefonbestellung", "Kontostand", "Jahreszins"]:
        parts = split_compound(lexicon, word)
        assert len(parts) > 1
        assert parts[-1] in lexicon.compound_heads


def test_every_lexicon_compound_reassembles(lexicon):
    words = set(lexicon.lemma_table) | set(lexicon.pos_table)
    split_count = 0
    for word in sorted(words):
        if not lexicon.is_noun(word):
            continue
        parts = split_compound(lexicon, word)
        if len(parts) < 2:
            continue
        split_count += 1
        base = lemmatize(lexicon, normalize(lexicon, word))
        assert can_reassemble(parts, base), f"{word}: {parts}"
        assert parts[-1] in lexicon.compound_heads
    assert split_count >= 5  # sanity: the lexicon does contain compounds


def test_split_compound_round_trip_fuzz(lexicon):
    # random concatenations of lexicon nouns with linking elements must
    # split into parts that rebuild the word
    rng = random.Random(11)
    nouns = sorted(w for w in lexicon.pos_table if lexicon.pos_table[w] == "noun" and len(w) > 3)
    heads = sorted(h for h in lexicon.compound_heads if h in lexicon.pos_table)
    for _ in range(200):
        first = rng.choice(nouns)
        linker = rng.choice(["", "s", "n", "es", "en"])
        head = rng.choice(heads)
        word = first + linker + head
        parts = split_compound(lexicon, word)
        base = lemmatize(lexicon, normalize(lexicon, word))
        assert can_reassemble(parts, base), f"{word}: {parts}"


# -- classify_sentence ----------------------------------------------------------


def _classify(lexicon, sentence):
    return classify_sentence(lexicon, annotate(lexicon, sentence))


def test_classify_greeting(lexicon):
    stype, attr, qtype, qword, agent, gtype = _classify(lexicon, "Hallo")
    assert (stype, attr, qtype, gtype) == ("Greeting", "statement", None, "opening")


def test_classify_closing_greeting(lexicon):
    stype, _, _, _, _, gtype = _classify(lexicon, "Tschüss")
    assert (stype, gtype) == ("Greeting", "closing")


def test_classify_action_question(lexicon):
    stype, attr, qtype, qword, agent, _ = _classify(lexicon, "Können Sie mir Unterlagen zukommen lassen?")
    assert stype == "Action"
    assert attr == "question"
    assert qtype == "yesno_q"
    assert qword == "können"
    assert agent == "2nd"


def test_classify_ordinary_yesno(lexicon):
    stype, attr, qtype, qword, agent, _ = _classify(lexicon, "Ist eine Internetbestellung möglich?")
    assert stype == "Ordinary"
    assert attr == "question"
    assert qtype == "yesno_q"
    assert qword == "ist"
    assert agent == "no"


def test_classify_first_person_statement(lexicon):
    stype, attr, qtype, _, agent, _ = _classify(lexicon, "Ich möchte eine Kreditkarte bestellen.")
    assert stype == "Action"
    assert attr == "statement"
    assert qtype is None
    assert agent == "1st"


def test_qtype_iff_question(lexicon):
    for sentence in ["Hallo", "Was kostet die?", "Ich brauche einen Kredit.", "Am Telefon?"]:
        _, attr, qtype, _, _, _ = _classify(lexicon, sentence)
        assert (qtype is not None) == (attr == "question")


def test_classify_empty_raises(lexicon):
    with pytest.raises(ValueError):
        classify_sentence(lexicon, [])


# -- extract_phrases ------------------------------------------------------------


def test_extract_action_sentence(lexicon):
    tokens = annotate(lexicon, "Können Sie mir Unterlagen zukommen lassen?")
    nps, vps, candidates = extract_phrases(lexicon, tokens)
    assert nps == ["unterlagen"]
    assert vps == ["zukommen lassen"]
    assert candidates == ["unterlagen", "unterlagen zukommen lassen"]


def test_extract_pronoun_question_has_no_nps(lexicon):
    tokens = annotate(lexicon, "Was kostet die?")
    nps, vps, candidates = extract_phrases(lexicon, tokens)
    assert nps == []
    assert vps == ["kosten"]
    assert candidates == []


def test_extract_wish_sentence(lexicon):
    tokens = annotate(lexicon, "Ich möchte eine Kreditkarte bestellen.")
    nps, _, candidates = extract_phrases(lexicon, tokens)
    assert nps == ["kreditkarte"]
    assert "kreditkarte" in candidates
    assert "kreditkarte bestellen" in candidates


def test_extract_separable_verb(lexicon):
    tokens = annotate(lexicon, "Bieten Sie Leasing an?")
    _, vps, _ = extract_phrases(lexicon, tokens)
    assert vps == ["anbieten"]


# -- build_query ---------------------------------------------------------------


def test_build_query_greeting_short_circuit(lexicon):
    queries = build_query(lexicon, "Hallo!")
    assert len(queries) == 1
    q = queries[0]
    assert q.sentence_type == "Greeting"
    assert q.is_uninformative is True
    assert q.intents == [] and q.kphrases == []
    assert q.length == 1


def test_build_query_two_sentences(lexicon):
    queries = build_query(lexicon, "Ich brauche einen Kredit. Was kostet das?")
    assert len(queries) == 2
    for q in queries:
        assert q.length == len([t for t in q.tokens if not t.is_punct])


def test_build_query_multi_np(lexicon):
    queries = build_query(lexicon, "Was kostet eine Kredit und zu welcher Laufzeit?")
    assert len(queries) == 1
    assert queries[0].noun_phrases == ["kredit", "laufzeit"]
    assert queries[0].type_attr == "question"


def test_build_query_word_count_excludes_punctuation(lexicon):
    q = build_query(lexicon, "Können Sie mir Unterlagen zukommen lassen?")[0]
    assert q.length == 6


def test_build_query_empty_message(lexicon):
    with pytest.raises(ValueError):
        build_query(lexicon, "   ")


def test_build_query_uninformative_iff_no_content(lexicon):
    q = build_query(lexicon, "Was kostet die?")[0]
    assert q.is_uninformative is True
    q = build_query(lexicon, "Was kostet der Kredit?")[0]
    assert q.is_uninformative is False


def test_build_query_with_ranking(lexicon, bm25, intent_model):
    from ontodm.ranking import classify_intent, rank_keyphrases

    queries = build_query(
        lexicon,
        "Können Sie mir Unterlagen zukommen lassen?",
        rank_candidates=lambda c: rank_keyphrases(bm25, c),
        classify_intents=lambda t: classify_intent(intent_model, t),
    )
    q = queries[0]
    assert set(q.kphrases) == {"unterlagen", "unterlagen zukommen lassen"}
    assert q.intents[0] == "send_document"
    assert q.is_uninformative is False
