"""Independent reference implementations the test suite checks against.

Deliberately written from the definitions, not by reusing the production
code paths: transitive closure by repeated joins, level-order enumeration
over the raw entity maps, degree recount over the edge list, and a direct
transliteration of the BM25 formula.
"""

from __future__ import annotations

import math
import random
from collections import Counter

from ontodm.ontology import OntologyGraph


def closure_subclasses(graph: OntologyGraph, root: str) -> list[str]:
    """Transitive descendants by repeated joins over the parents table."""
    out: set[str] = set()
    changed = True
    while changed:
        changed = False
        for cls in graph.classes.values():
            if cls.id in out:
                continue
            if any(p == root or p in out for p in cls.parents):
                out.add(cls.id)
                changed = True
    return sorted(out)


def enumerate_bfs(graph: OntologyGraph, root: str, target_lemma: str, skip=frozenset()) -> str | None:
    """Exhaustive level-order enumeration straight off the entity maps."""

    def children(node: str) -> list[str]:
        subs = sorted(c.id for c in graph.classes.values() if node in c.parents)
        inds = sorted(i.id for i in graph.individuals.values() if i.class_id == node)
        props = sorted(p.id for p in graph.data_properties.values() if p.domain == node)
        return subs + inds + props

    level = [root]
    seen = {root}
    while level:
        for node in level:
            if node not in skip and target_lemma in graph.node_lemmas(node):
                return node
        nxt: list[str] = []
        for node in level:
            for child in children(node):
                if child not in seen:
                    seen.add(child)
                    nxt.append(child)
        level = nxt
    return None


def recount_metrics(graph: OntologyGraph) -> tuple[float, int, int]:
    """Degree statistics by iterating the edge list and counting per node."""
    nodes = list(graph.classes)
    if not nodes:
        return 0.0, 0, 0
    degree = Counter({n: 0 for n in nodes})
    out_deg = Counter({n: 0 for n in nodes})
    in_deg = Counter({n: 0 for n in nodes})
    for op in graph.object_properties.values():
        degree[op.domain] += 1
        degree[op.range] += 1
        out_deg[op.domain] += 1
        in_deg[op.range] += 1
    for cls in graph.classes.values():
        for parent in cls.parents:
            degree[cls.id] += 1
            degree[parent] += 1
    return sum(degree.values()) / len(nodes), max(out_deg.values()), max(in_deg.values())


def reference_bm25_score(
    doc_token_lists: list[list[str]], candidate_terms: list[str], k1: float = 1.5, b: float = 0.75
) -> float:
    """Best-document BM25 score, transliterated from the formula."""
    n = len(doc_token_lists)
    avgdl = sum(len(d) for d in doc_token_lists) / n
    df: Counter = Counter()
    for doc in doc_token_lists:
        df.update(set(doc))
    best = 0.0
    for doc in doc_token_lists:
        tf = Counter(doc)
        score = 0.0
        for term in candidate_terms:
            f = tf[term]
            if f == 0:
                continue
            idf = math.log((n - df[term] + 0.5) / (df[term] + 0.5) + 1)
            score += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * len(doc) / avgdl))
        best = max(best, score)
    return best


def can_reassemble(parts: list[str], word: str, linkers=("", "s", "n", "es", "en")) -> bool:
    """True when the parts joined by permitted linking elements rebuild the word."""
    positions = {0}
    for i, part in enumerate(parts):
        nxt: set[int] = set()
        last = i == len(parts) - 1
        for pos in positions:
            if not word.startswith(part, pos):
                continue
            end = pos + len(part)
            if last:
                if end == len(word):
                    return True
                continue
            for linker in linkers:
                if word.startswith(linker, end):
                    nxt.add(end + len(linker))
        positions = nxt
        if not positions:
            return False
    return False


# -- random instance generators (seeded by the caller) ----------------------

_SYLLABLES = [
    "ba", "del", "fin", "gor", "ket", "lum", "mir", "nol", "pra", "quis",
    "rol", "sta", "tur", "vek", "wol", "zam", "bri", "dos", "fen", "gul",
]


def random_word(rng: random.Random, syllables: int = 2) -> str:
    return "".join(rng.choice(_SYLLABLES) for _ in range(syllables))


def random_ontology_doc(rng: random.Random, max_nodes: int = 50) -> dict:
    """A valid-by-construction ontology document with designated roots."""
    classes = [
        {"id": "Produktwurzel", "label": "Produktwurzel", "parents": [], "kind": "concept"},
        {"id": "Servicewurzel", "label": "Servicewurzel", "parents": [], "kind": "concept"},
    ]
    product_reachable = {"Produktwurzel"}
    n_classes = rng.randint(1, max(1, max_nodes - 10))
    for i in range(n_classes):
        cid = f"K{i}_{random_word(rng)}"
        n_parents = 1 if rng.random() < 0.85 else 2
        parents = [c["id"] for c in rng.sample(classes, min(n_parents, len(classes)))]
        under_product = any(p in product_reachable for p in parents)
        if under_product:
            kind = rng.choice(["product", "product", "attribute_concept", "concept"])
        else:
            kind = rng.choice(["concept", "attribute_concept"])
        if kind == "product":
            product_reachable.add(cid)
        entry = {"id": cid, "label": random_word(rng, 3), "parents": parents, "kind": kind}
        if rng.random() < 0.3:
            entry["synonyms"] = [random_word(rng, 2)]
        classes.append(entry)

    class_ids = [c["id"] for c in classes]
    ancestors: dict[str, set[str]] = {}

    def lineage(cid: str) -> set[str]:
        if cid not in ancestors:
            cls = next(c for c in classes if c["id"] == cid)
            out = {cid}
            for p in cls["parents"]:
                out |= lineage(p)
            ancestors[cid] = out
        return ancestors[cid]

    data_properties = []
    for i in range(rng.randint(0, 8)):
        data_properties.append(
            {"id": f"p{i}_{random_word(rng)}", "label": random_word(rng), "domain": rng.choice(class_ids)}
        )

    individuals = []
    for i in range(rng.randint(0, 10)):
        class_id = rng.choice(class_ids)
        attrs = {}
        usable = [p for p in data_properties if p["domain"] in lineage(class_id)]
        for prop in rng.sample(usable, min(len(usable), rng.randint(0, 2))):
            attrs[prop["id"]] = {"value": rng.choice([rng.randint(0, 500), random_word(rng), True])}
        entry = {"id": f"I{i}_{random_word(rng)}", "class": class_id}
        if attrs:
            entry["attributes"] = attrs
        individuals.append(entry)

    object_properties = [
        {
            "id": f"o{i}_{random_word(rng)}",
            "label": random_word(rng),
            "domain": rng.choice(class_ids),
            "range": rng.choice(class_ids),
        }
        for i in range(rng.randint(0, 6))
    ]

    return {
        "roots": {"product": "Produktwurzel", "service": "Servicewurzel"},
        "classes": classes,
        "individuals": individuals,
        "object_properties": object_properties,
        "data_properties": data_properties,
    }


_MESSAGE_TEMPLATES = [
    "Hallo!",
    "Was kostet {label}?",
    "Ich möchte {label} bestellen.",
    "Was ist {label}?",
    "Bieten Sie {label} an?",
    "{label}?",
    "Was kostet die?",
    "Welche Produkte haben Sie?",
    "Was bieten Sie an?",
    "Danke",
    "Gibt es {label} bei Ihnen?",
    "Wie hoch ist der Zins?",
    "blorp frzzt",
]


def random_message(rng: random.Random, labels: list[str]) -> str:
    template = rng.choice(_MESSAGE_TEMPLATES)
    if "{label}" in template:
        label = rng.choice(labels) if labels and rng.random() < 0.8 else random_word(rng, 3)
        return template.format(label=label)
    return template


def random_script(rng: random.Random, labels: list[str], turns: int) -> list[str]:
    return [random_message(rng, labels) for _ in range(turns)]
