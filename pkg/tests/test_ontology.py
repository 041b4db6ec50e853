import json
import random

import pytest

from ontodm.nlu import lemmatize
from ontodm.ontology import (
    AttributeValue,
    OntologyValidationError,
    bfs_under,
    graph_metrics,
    individuals_of,
    load_ontology,
    lookup_attribute,
    lookup_attribute_entry,
    subclasses,
)

from .oracles import closure_subclasses, enumerate_bfs, random_ontology_doc, recount_metrics


def test_load_sample_graph(graph):
    assert "Kreditkarte" in graph.classes
    assert graph.individuals["Mastercard"].class_id == "Kreditkarte"
    assert graph.product_root == "Finanzprodukt"


def test_load_empty_document():
    graph = load_ontology({"classes": [], "individuals": []})
    assert graph.classes == {} and graph.individuals == {}


def test_subclass_cycle_rejected():
    doc = {
        "classes": [
            {"id": "A", "parents": ["B"]},
            {"id": "B", "parents": ["A"]},
        ]
    }
    with pytest.raises(OntologyValidationError) as err:
        load_ontology(doc)
    assert any("subclass cycle" in v for v in err.value.violations)


def test_validation_collects_every_violation():
    doc = {
        "classes": [
            {"id": "A", "parents": ["Missing"]},
            {"id": "A", "parents": []},
        ],
        "individuals": [{"id": "x", "class": "Nowhere"}],
    }
    with pytest.raises(OntologyValidationError) as err:
        load_ontology(doc)
    text = "\n".join(err.value.violations)
    assert "duplicate id" in text
    assert "dangling parent" in text
    assert "dangling class" in text


def test_unknown_keys_rejected():
    with pytest.raises(OntologyValidationError) as err:
        load_ontology({"classes": [{"id": "A", "lable": "typo"}]})
    assert any("unknown keys" in v for v in err.value.violations)


def test_product_kind_requires_root_lineage():
    doc = {
        "roots": {"product": "Root"},
        "classes": [
            {"id": "Root", "kind": "concept"},
            {"id": "Floating", "kind": "product", "parents": []},
        ],
    }
    with pytest.raises(OntologyValidationError) as err:
        load_ontology(doc)
    assert any("not a descendant" in v for v in err.value.violations)


def test_subclasses_direct(graph):
    assert subclasses(graph, "Konto", direct=True) == ["Girokonto", "Sparkonto"]
    assert subclasses(graph, "Girokonto", direct=True) == []


def test_subclasses_transitive_matches_closure_oracle(graph):
    # frozen from the repeated-joins oracle over the parents table
    expected = [
        "Bestellung", "Girokonto", "Hypothek", "Internet", "Konto",
        "Kredit", "Kreditkarte", "Sparkonto", "Telefon", "Unterlagen",
    ]
    assert closure_subclasses(graph, "Finanzprodukt") == expected
    assert subclasses(graph, "Finanzprodukt", direct=False) == expected


def test_subclasses_unknown_class(graph):
    with pytest.raises(KeyError):
        subclasses(graph, "Nope", direct=True)


def test_individuals_of(graph):
    assert individuals_of(graph, "Girokonto", transitive=False) == ["Standard4Konto", "Superkonto"]
    assert individuals_of(graph, "Kreditkarte", transitive=False) == ["Mastercard"]
    assert individuals_of(graph, "Hypothek", transitive=False) == []
    assert individuals_of(graph, "Konto", transitive=True) == ["Standard4Konto", "Superkonto"]


def test_bfs_under_finds_subclass(graph):
    assert bfs_under(graph, "Bestellung", "internet") == "Internet"


def test_bfs_under_depth_zero_hit(graph):
    assert bfs_under(graph, "Kredit", "kredit") == "Kredit"


def test_bfs_under_with_skip(graph):
    # derived via exhaustive level-order enumeration of the sample graph
    assert enumerate_bfs(graph, "Kredit", "telefon", skip={"Internet"}) == "Telefon"
    assert bfs_under(graph, "Kredit", "telefon", skip={"Internet"}) == "Telefon"


def test_bfs_under_unknown_root(graph):
    with pytest.raises(KeyError):
        bfs_under(graph, "Nope", "x")


def test_bfs_deterministic(graph):
    first = bfs_under(graph, "Finanzprodukt", "bestellung")
    assert all(bfs_under(graph, "Finanzprodukt", "bestellung") == first for _ in range(5))


def test_lookup_attribute_individual(graph):
    value = lookup_attribute(graph, "Mastercard", "kosten")
    assert value == AttributeValue(value="80 Euro jährlich")


def test_lookup_attribute_number(graph):
    value = lookup_attribute(graph, "4Kredit", "zins")
    assert value.value == 0.23


def test_lookup_attribute_by_synonym(graph):
    entry = lookup_attribute_entry(graph, "4Kredit", "zinssatz")
    assert entry is not None and entry[0] == "zins"


def test_lookup_attribute_class_default(graph):
    # oracle for the pronoun-on-class case: the class-level default answers
    value = lookup_attribute(graph, "Kreditkarte", "kosten")
    assert value == AttributeValue(value="ab 80 Euro jährlich")


def test_lookup_attribute_inherited(graph):
    # hinweis is declared on the product root; Internet inherits the default
    value = lookup_attribute(graph, "Internet", "hinweis")
    assert value is not None and "beantragen" in str(value.value)


def test_lookup_attribute_miss(graph):
    assert lookup_attribute(graph, "Mastercard", "nonexistent") is None


def test_graph_metrics_trivial_cases():
    single = load_ontology({"classes": [{"id": "A"}]})
    m = graph_metrics(single)
    assert (m.avg_degree, m.max_out_degree, m.max_in_degree) == (0.0, 0, 0)

    two = load_ontology(
        {
            "classes": [{"id": "A"}, {"id": "B"}],
            "object_properties": [{"id": "r", "label": "r", "domain": "A", "range": "B"}],
        }
    )
    assert graph_metrics(two).avg_degree == 1.0


def test_graph_metrics_sample_matches_recount(graph):
    m = graph_metrics(graph)
    avg, out_deg, in_deg = recount_metrics(graph)
    assert m.avg_degree == avg
    assert m.max_out_degree == out_deg == 4
    assert m.max_in_degree == in_deg == 1


def test_graph_metrics_random_graphs_match_recount(lexicon):
    rng = random.Random(99)
    for _ in range(100):
        doc = random_ontology_doc(rng)
        g = load_ontology(doc, lemmatize=lambda w: lemmatize(lexicon, w))
        m = graph_metrics(g)
        avg, out_deg, in_deg = recount_metrics(g)
        assert m.avg_degree == avg
        assert m.max_out_degree == out_deg
        assert m.max_in_degree == in_deg


def test_every_individual_in_its_class_listing(graph):
    for ind in graph.individuals.values():
        assert ind.id in individuals_of(graph, ind.class_id, transitive=False)


def test_topological_order_exists(graph):
    # acyclicity: peel classes with no unvisited parents until none remain
    remaining = {cid: set(c.parents) for cid, c in graph.classes.items()}
    while remaining:
        free = [cid for cid, ps in remaining.items() if not ps]
        assert free, "cycle in subclass relation"
        for cid in free:
            del remaining[cid]
            for ps in remaining.values():
                ps.discard(cid)


def test_roundtrip_serialization(graph, lexicon):
    doc = graph.to_doc()
    reloaded = load_ontology(json.loads(json.dumps(doc)), lemmatize=lambda w: lemmatize(lexicon, w))
    assert reloaded.classes == graph.classes
    assert reloaded.individuals == graph.individuals
    assert reloaded.object_properties == graph.object_properties
    assert reloaded.data_properties == graph.data_properties


def test_lookup_never_invents_values(graph):
    # values always come from the individual or its class lineage
    for ind in graph.individuals.values():
        lineage = [ind.class_id, *graph.ancestors(ind.class_id)]
        declared = set(ind.attributes)
        for cid in lineage:
            declared |= set(graph.classes[cid].attributes)
        for prop_id in graph.data_properties:
            hit = lookup_attribute_entry(graph, ind.id, graph.phrase_lemma(graph.data_properties[prop_id].label))
            if hit is not None:
                assert hit[0] in declared
