"""Domain ontology: a typed directed graph of classes, individuals and properties.

The graph doubles as knowledge base (attribute lookup) and as the substrate
the dialogue manager searches while resolving what the user talks about.
Immutable after load; all operations are read-only.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

CLASS_KINDS = ("product", "service", "concept", "attribute_concept")

Lemmatizer = Callable[[str], str]


class OntologyError(Exception):
    pass


class OntologyParseError(OntologyError):
    """Raised when the document is not valid JSON or has a wrong shape."""


class OntologyValidationError(OntologyError):
    """Carries every violation found, not just the first one."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class AttributeValue:
    value: float | int | str | bool
    unit: str | None = None

    def render(self) -> str:
        if isinstance(self.value, bool):
            text = "ja" if self.value else "nein"
        elif isinstance(self.value, float):
            text = repr(self.value)
        else:
            text = str(self.value)
        return f"{text} {self.unit}" if self.unit else text


@dataclass(frozen=True)
class OntologyClass:
    id: str
    label: str
    parents: tuple[str, ...] = ()
    kind: str = "concept"
    synonyms: tuple[str, ...] = ()
    plural: str | None = None
    attributes: dict[str, AttributeValue] = field(default_factory=dict)


@dataclass(frozen=True)
class Individual:
    id: str
    label: str
    class_id: str
    attributes: dict[str, AttributeValue] = field(default_factory=dict)


@dataclass(frozen=True)
class ObjectProperty:
    id: str
    label: str
    domain: str
    range: str


@dataclass(frozen=True)
class DataProperty:
    id: str
    label: str
    domain: str
    synonyms: tuple[str, ...] = ()
    prompt: str | None = None
    suggestible: bool = True


@dataclass(frozen=True)
class GraphMetrics:
    avg_degree: float
    max_out_degree: int
    max_in_degree: int


_CLASS_KEYS = {"id", "label", "parents", "kind", "synonyms", "plural", "attributes"}
_INDIVIDUAL_KEYS = {"id", "label", "class", "attributes"}
_OBJECT_PROP_KEYS = {"id", "label", "domain", "range"}
_DATA_PROP_KEYS = {"id", "label", "domain", "synonyms", "prompt", "suggestible"}
_TOP_KEYS = {"classes", "individuals", "object_properties", "data_properties", "roots"}
_ATTR_KEYS = {"value", "unit"}


class OntologyGraph:
    """Indexed, validated view over an ontology document.

    Node id space covers classes, individuals and data properties: the
    resolution search treats attribute relations as locatable nodes.
    """

    def __init__(
        self,
        classes: dict[str, OntologyClass],
        individuals: dict[str, Individual],
        object_properties: dict[str, ObjectProperty],
        data_properties: dict[str, DataProperty],
        product_root: str | None,
        service_root: str | None,
        lemmatize: Lemmatizer | None = None,
    ):
        self.classes = classes
        self.individuals = individuals
        self.object_properties = object_properties
        self.data_properties = data_properties
        self.product_root = product_root
        self.service_root = service_root
        self._lemmatize = lemmatize or (lambda w: w.casefold())

        # child -> parents comes from the class records; build parent -> children.
        # Dangling references are tolerated here so the validator can report
        # all of them instead of crashing on the first.
        self.children_index: dict[str, list[str]] = {cid: [] for cid in classes}
        for cls in classes.values():
            for parent in cls.parents:
                if parent in self.children_index:
                    self.children_index[parent].append(cls.id)
        for kids in self.children_index.values():
            kids.sort()

        self.individuals_index: dict[str, list[str]] = {cid: [] for cid in classes}
        for ind in individuals.values():
            if ind.class_id in self.individuals_index:
                self.individuals_index[ind.class_id].append(ind.id)
        for ids in self.individuals_index.values():
            ids.sort()

        self.props_index: dict[str, list[str]] = {cid: [] for cid in classes}
        for prop in data_properties.values():
            if prop.domain in self.props_index:
                self.props_index[prop.domain].append(prop.id)
        for ids in self.props_index.values():
            ids.sort()

        # lemma of label/synonym -> node ids, for phrase matching
        self.lemma_index: dict[str, list[str]] = {}
        for node_id in self.node_ids():
            for lemma in self.node_lemmas(node_id):
                self.lemma_index.setdefault(lemma, []).append(node_id)
        for ids in self.lemma_index.values():
            ids.sort()

    # -- basic accessors -------------------------------------------------

    def node_ids(self) -> list[str]:
        return list(self.classes) + list(self.individuals) + list(self.data_properties)

    def has_node(self, node_id: str) -> bool:
        return (
            node_id in self.classes
            or node_id in self.individuals
            or node_id in self.data_properties
        )

    def node_kind(self, node_id: str) -> str:
        if node_id in self.classes:
            return "class"
        if node_id in self.individuals:
            return "individual"
        if node_id in self.data_properties:
            return "data_property"
        raise KeyError(f"unknown node id: {node_id}")

    def node_label(self, node_id: str) -> str:
        kind = self.node_kind(node_id)
        if kind == "class":
            return self.classes[node_id].label
        if kind == "individual":
            return self.individuals[node_id].label
        return self.data_properties[node_id].label

    def plural_label(self, class_id: str) -> str:
        cls = self.classes[class_id]
        return cls.plural or cls.label

    def phrase_lemma(self, phrase: str) -> str:
        return " ".join(self._lemmatize(w) for w in phrase.casefold().split())

    def node_lemmas(self, node_id: str) -> list[str]:
        """Lemma forms under which a node is findable: label, synonyms, id."""
        kind = self.node_kind(node_id)
        surfaces = [self.node_label(node_id), node_id]
        if kind == "class":
            surfaces.extend(self.classes[node_id].synonyms)
        elif kind == "data_property":
            surfaces.extend(self.data_properties[node_id].synonyms)
        seen: list[str] = []
        for surface in surfaces:
            lemma = self.phrase_lemma(surface)
            if lemma and lemma not in seen:
                seen.append(lemma)
        return seen

    def ancestors(self, class_id: str) -> list[str]:
        """All transitive superclasses, nearest level first, ids sorted per level."""
        out: list[str] = []
        seen = {class_id}
        frontier = sorted(p for p in self.classes[class_id].parents if p in self.classes)
        while frontier:
            level = [c for c in frontier if c not in seen]
            out.extend(level)
            seen.update(level)
            nxt: set[str] = set()
            for cid in level:
                nxt.update(p for p in self.classes[cid].parents if p in self.classes)
            frontier = sorted(nxt)
        return out

    def is_descendant_of(self, class_id: str, root_id: str) -> bool:
        return root_id in self.ancestors(class_id)

    def is_product_class(self, class_id: str) -> bool:
        return self.classes[class_id].kind in ("product", "service")

    def class_of_individual(self, individual_id: str) -> str:
        return self.individuals[individual_id].class_id

    def search_children(self, node_id: str) -> list[str]:
        """Child order used by the breadth-first search: subclasses, then
        individuals, then data properties declared on the node, each block
        sorted by id. Individuals and property nodes are leaves."""
        if node_id not in self.classes:
            return []
        return (
            self.children_index[node_id]
            + self.individuals_index[node_id]
            + self.props_index[node_id]
        )

    def to_doc(self) -> dict:
        """Serialize back to the document format (round-trips through load)."""

        def attr_doc(attrs: dict[str, AttributeValue]) -> dict:
            out = {}
            for key in sorted(attrs):
                av = attrs[key]
                entry: dict = {"value": av.value}
                if av.unit is not None:
                    entry["unit"] = av.unit
                out[key] = entry
            return out

        doc: dict = {"classes": [], "individuals": [], "object_properties": [], "data_properties": []}
        for cls in self.classes.values():
            entry: dict = {"id": cls.id, "label": cls.label, "parents": list(cls.parents), "kind": cls.kind}
            if cls.synonyms:
                entry["synonyms"] = list(cls.synonyms)
            if cls.plural:
                entry["plural"] = cls.plural
            if cls.attributes:
                entry["attributes"] = attr_doc(cls.attributes)
            doc["classes"].append(entry)
        for ind in self.individuals.values():
            entry = {"id": ind.id, "class": ind.class_id}
            if ind.label != ind.id:
                entry["label"] = ind.label
            if ind.attributes:
                entry["attributes"] = attr_doc(ind.attributes)
            doc["individuals"].append(entry)
        for op in self.object_properties.values():
            doc["object_properties"].append(
                {"id": op.id, "label": op.label, "domain": op.domain, "range": op.range}
            )
        for dp in self.data_properties.values():
            entry = {"id": dp.id, "label": dp.label, "domain": dp.domain}
            if dp.synonyms:
                entry["synonyms"] = list(dp.synonyms)
            if dp.prompt:
                entry["prompt"] = dp.prompt
            if not dp.suggestible:
                entry["suggestible"] = False
            doc["data_properties"].append(entry)
        roots = {}
        if self.product_root:
            roots["product"] = self.product_root
        if self.service_root:
            roots["service"] = self.service_root
        if roots:
            doc["roots"] = roots
        return doc


def _check_keys(entry: dict, allowed: set[str], where: str, problems: list[str]) -> None:
    unknown = set(entry) - allowed
    if unknown:
        problems.append(f"{where}: unknown keys {sorted(unknown)}")


def _parse_attributes(raw: dict, where: str, problems: list[str]) -> dict[str, AttributeValue]:
    attrs: dict[str, AttributeValue] = {}
    for key, entry in raw.items():
        if not isinstance(entry, dict):
            problems.append(f"{where}: attribute '{key}' must be an object")
            continue
        _check_keys(entry, _ATTR_KEYS, f"{where}.{key}", problems)
        if "value" not in entry:
            problems.append(f"{where}: attribute '{key}' missing 'value'")
            continue
        value = entry["value"]
        if isinstance(value, float) and (value != value or value in (float("inf"), float("-inf"))):
            problems.append(f"{where}: attribute '{key}' value must be finite")
            continue
        if not isinstance(value, (int, float, str, bool)):
            problems.append(f"{where}: attribute '{key}' value must be number, text or boolean")
            continue
        attrs[key] = AttributeValue(value=value, unit=entry.get("unit"))
    return attrs


def load_ontology(source: str | Path | dict, lemmatize: Lemmatizer | None = None) -> OntologyGraph:
    """Parse and validate an ontology document (path or parsed dict).

    Raises OntologyParseError on malformed JSON/shape and
    OntologyValidationError listing every semantic violation found.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text(encoding="utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise OntologyParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise OntologyParseError("ontology document must be a JSON object")

    problems: list[str] = []
    _check_keys(doc, _TOP_KEYS, "document", problems)
    for section in ("classes", "individuals", "object_properties", "data_properties"):
        if section in doc and not isinstance(doc[section], list):
            raise OntologyParseError(f"'{section}' must be a list")

    classes: dict[str, OntologyClass] = {}
    individuals: dict[str, Individual] = {}
    object_properties: dict[str, ObjectProperty] = {}
    data_properties: dict[str, DataProperty] = {}
    all_ids: set[str] = set()

    def claim_id(node_id: str, where: str) -> bool:
        if node_id in all_ids:
            problems.append(f"{where}: duplicate id '{node_id}'")
            return False
        all_ids.add(node_id)
        return True

    for i, entry in enumerate(doc.get("classes", [])):
        where = f"classes[{i}]"
        if not isinstance(entry, dict) or "id" not in entry:
            problems.append(f"{where}: missing id")
            continue
        _check_keys(entry, _CLASS_KEYS, where, problems)
        cid = entry["id"]
        kind = entry.get("kind", "concept")
        if kind not in CLASS_KINDS:
            problems.append(f"{where}: unknown kind '{kind}'")
        if claim_id(cid, where):
            classes[cid] = OntologyClass(
                id=cid,
                label=entry.get("label", cid),
                parents=tuple(entry.get("parents", [])),
                kind=kind,
                synonyms=tuple(entry.get("synonyms", [])),
                plural=entry.get("plural"),
                attributes=_parse_attributes(entry.get("attributes", {}), where, problems),
            )

    for i, entry in enumerate(doc.get("individuals", [])):
        where = f"individuals[{i}]"
        if not isinstance(entry, dict) or "id" not in entry:
            problems.append(f"{where}: missing id")
            continue
        _check_keys(entry, _INDIVIDUAL_KEYS, where, problems)
        if "class" not in entry:
            problems.append(f"{where}: missing class")
            continue
        iid = entry["id"]
        if claim_id(iid, where):
            individuals[iid] = Individual(
                id=iid,
                label=entry.get("label", iid),
                class_id=entry["class"],
                attributes=_parse_attributes(entry.get("attributes", {}), where, problems),
            )

    for i, entry in enumerate(doc.get("object_properties", [])):
        where = f"object_properties[{i}]"
        if not isinstance(entry, dict) or "id" not in entry:
            problems.append(f"{where}: missing id")
            continue
        _check_keys(entry, _OBJECT_PROP_KEYS, where, problems)
        pid = entry["id"]
        if claim_id(pid, where):
            object_properties[pid] = ObjectProperty(
                id=pid,
                label=entry.get("label", pid),
                domain=entry.get("domain", ""),
                range=entry.get("range", ""),
            )

    for i, entry in enumerate(doc.get("data_properties", [])):
        where = f"data_properties[{i}]"
        if not isinstance(entry, dict) or "id" not in entry:
            problems.append(f"{where}: missing id")
            continue
        _check_keys(entry, _DATA_PROP_KEYS, where, problems)
        pid = entry["id"]
        if claim_id(pid, where):
            data_properties[pid] = DataProperty(
                id=pid,
                label=entry.get("label", pid),
                domain=entry.get("domain", ""),
                synonyms=tuple(entry.get("synonyms", [])),
                prompt=entry.get("prompt"),
                suggestible=entry.get("suggestible", True),
            )

    roots = doc.get("roots", {})
    if not isinstance(roots, dict):
        raise OntologyParseError("'roots' must be an object")
    _check_keys(roots, {"product", "service"}, "roots", problems)
    product_root = roots.get("product")
    service_root = roots.get("service")

    # referential checks
    for cls in classes.values():
        for parent in cls.parents:
            if parent not in classes:
                problems.append(f"class '{cls.id}': dangling parent '{parent}'")
    for ind in individuals.values():
        if ind.class_id not in classes:
            problems.append(f"individual '{ind.id}': dangling class '{ind.class_id}'")
    for op in object_properties.values():
        if op.domain not in classes:
            problems.append(f"object property '{op.id}': dangling domain '{op.domain}'")
        if op.range not in classes:
            problems.append(f"object property '{op.id}': dangling range '{op.range}'")
    for dp in data_properties.values():
        if dp.domain not in classes:
            problems.append(f"data property '{dp.id}': dangling domain '{dp.domain}'")
    for root_id, name in ((product_root, "product"), (service_root, "service")):
        if root_id is not None and root_id not in classes:
            problems.append(f"roots.{name}: dangling class '{root_id}'")

    # subclass acyclicity (Kahn over the parent relation)
    indeg = {cid: 0 for cid in classes}
    for cls in classes.values():
        for parent in cls.parents:
            if parent in classes:
                indeg[cls.id] += 0  # direction: child depends on parent
    # count children per class, then peel leaves upward
    pending = {cid: len([p for p in classes[cid].parents if p in classes]) for cid in classes}
    queue = deque(cid for cid, n in pending.items() if n == 0)
    children: dict[str, list[str]] = {cid: [] for cid in classes}
    for cls in classes.values():
        for parent in cls.parents:
            if parent in classes:
                children[parent].append(cls.id)
    visited_count = 0
    while queue:
        cid = queue.popleft()
        visited_count += 1
        for child in children[cid]:
            pending[child] -= 1
            if pending[child] == 0:
                queue.append(child)
    if visited_count < len(classes):
        cyclic = sorted(cid for cid, n in pending.items() if n > 0)
        problems.append(f"subclass cycle involving {cyclic}")
        # strip cyclic parents so the graph can still be built for error paths
        for cid in cyclic:
            classes[cid] = OntologyClass(
                id=cid, label=classes[cid].label, parents=(), kind=classes[cid].kind,
                synonyms=classes[cid].synonyms, plural=classes[cid].plural,
                attributes=classes[cid].attributes,
            )

    graph = OntologyGraph(
        classes, individuals, object_properties, data_properties,
        product_root, service_root, lemmatize,
    )

    # checks that need the assembled hierarchy
    for cls in classes.values():
        if cls.kind in ("product", "service"):
            root = product_root if cls.kind == "product" else service_root
            if root is None:
                problems.append(f"class '{cls.id}': kind '{cls.kind}' requires roots.{cls.kind}")
            elif root in classes and not graph.is_descendant_of(cls.id, root):
                problems.append(f"class '{cls.id}': kind '{cls.kind}' but not a descendant of '{root}'")

    def check_attr_domains(owner_id: str, class_id: str, attrs: dict[str, AttributeValue]) -> None:
        if class_id not in classes:
            return
        lineage = {class_id, *graph.ancestors(class_id)}
        for key in attrs:
            if key not in data_properties:
                problems.append(f"'{owner_id}': attribute '{key}' is not a declared data property")
            elif data_properties[key].domain not in lineage:
                problems.append(
                    f"'{owner_id}': data property '{key}' has domain "
                    f"'{data_properties[key].domain}' outside the class lineage"
                )

    for ind in individuals.values():
        check_attr_domains(ind.id, ind.class_id, ind.attributes)
    for cls in classes.values():
        check_attr_domains(cls.id, cls.id, cls.attributes)

    if problems:
        raise OntologyValidationError(problems)
    return graph


def subclasses(graph: OntologyGraph, class_id: str, direct: bool) -> list[str]:
    """Immediate children or all transitive descendants, sorted by id."""
    if class_id not in graph.classes:
        raise KeyError(f"unknown class id: {class_id}")
    if direct:
        return list(graph.children_index[class_id])
    out: set[str] = set()
    frontier = list(graph.children_index[class_id])
    while frontier:
        cid = frontier.pop()
        if cid in out:
            continue
        out.add(cid)
        frontier.extend(graph.children_index[cid])
    return sorted(out)


def individuals_of(graph: OntologyGraph, class_id: str, transitive: bool) -> list[str]:
    if class_id not in graph.classes:
        raise KeyError(f"unknown class id: {class_id}")
    ids = list(graph.individuals_index[class_id])
    if transitive:
        for cid in subclasses(graph, class_id, direct=False):
            ids.extend(graph.individuals_index[cid])
    return sorted(ids)


def bfs_under(
    graph: OntologyGraph,
    root_id: str,
    target_lemma: str,
    skip: set[str] | frozenset[str] = frozenset(),
) -> str | None:
    """Level-order search below root for a node whose label/synonym lemma
    equals target_lemma. Nodes in `skip` are traversed but never returned."""
    if not graph.has_node(root_id):
        raise KeyError(f"unknown node id: {root_id}")
    queue = deque([root_id])
    seen = {root_id}
    while queue:
        node_id = queue.popleft()
        if node_id not in skip and target_lemma in graph.node_lemmas(node_id):
            return node_id
        for child in graph.search_children(node_id):
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return None


def lookup_attribute_entry(
    graph: OntologyGraph, node_id: str, relation_lemma: str
) -> tuple[str, AttributeValue] | None:
    """Find (property id, value) for a relation named by lemma.

    Individuals are checked first, then their class defaults, then ancestor
    classes nearest-first; keys within a level are tried in sorted order.
    """
    if not graph.has_node(node_id):
        raise KeyError(f"unknown node id: {node_id}")

    def match_in(attrs: dict[str, AttributeValue]) -> tuple[str, AttributeValue] | None:
        for key in sorted(attrs):
            prop = graph.data_properties.get(key)
            if prop is not None and relation_lemma in graph.node_lemmas(key):
                return key, attrs[key]
        return None

    levels: list[dict[str, AttributeValue]] = []
    kind = graph.node_kind(node_id)
    if kind == "individual":
        ind = graph.individuals[node_id]
        levels.append(ind.attributes)
        class_id = ind.class_id
    elif kind == "class":
        class_id = node_id
    else:
        return None
    levels.append(graph.classes[class_id].attributes)
    for ancestor in graph.ancestors(class_id):
        levels.append(graph.classes[ancestor].attributes)

    for attrs in levels:
        hit = match_in(attrs)
        if hit is not None:
            return hit
    return None


def lookup_attribute(graph: OntologyGraph, node_id: str, relation_lemma: str) -> AttributeValue | None:
    hit = lookup_attribute_entry(graph, node_id, relation_lemma)
    return hit[1] if hit else None


def graph_metrics(graph: OntologyGraph) -> GraphMetrics:
    """Degree statistics over the class schema.

    Directed max in/out count object-property edges only; the average degree
    is over the undirected union of object-property and subclass edges.
    """
    nodes = list(graph.classes)
    if not nodes:
        return GraphMetrics(avg_degree=0.0, max_out_degree=0, max_in_degree=0)
    out_deg = {cid: 0 for cid in nodes}
    in_deg = {cid: 0 for cid in nodes}
    undirected_edges = 0
    for op in graph.object_properties.values():
        out_deg[op.domain] += 1
        in_deg[op.range] += 1
        undirected_edges += 1
    for cls in graph.classes.values():
        undirected_edges += len(cls.parents)
    return GraphMetrics(
        avg_degree=2 * undirected_edges / len(nodes),
        max_out_degree=max(out_deg.values()),
        max_in_degree=max(in_deg.values()),
    )
