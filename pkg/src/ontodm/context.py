"""Dialogue state and the context resolution algorithm.

The ContextObject carries four node pointers plus the cycle-prevention
memory (visited nodes, used attribute edges). Resolution is a pure
transition: (context, query) -> (outcome, new context). Exactly one rule
fires per query; the precedence is greeting/chitchat, individual mention,
product-class mention, pronoun reference, implicit attribute reference,
closed-world denial, intent fallback, empty-context prompt, fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from . import matching, nlu, ontology
from .matching import EmbeddingTable, MatchResult, is_ambiguous, match_phrase
from .nlu import Lexicon, QueryObject, main_verb_lemmas
from .ontology import OntologyGraph, bfs_under, individuals_of, lookup_attribute_entry, subclasses

EOI_HISTORY_LIMIT = 50


class ContextStateError(Exception):
    """A context pointer references a node the graph does not contain."""


@dataclass(frozen=True)
class EntityOfInterest:
    node_id: str
    role: str  # product | individual | attribute | leaf


@dataclass(frozen=True)
class ContextObject:
    curr_prod: str | None = None
    curr_prod_indiv: str | None = None
    curr_inode: str | None = None
    curr_leaf: str | None = None
    message_index: int = 0
    visited_nodes: frozenset[str] = frozenset()
    used_edges: frozenset[tuple[str, str]] = frozenset()
    eoi_history: tuple[tuple[str, int], ...] = ()

    def snapshot(self) -> dict:
        return {
            "curr_prod": self.curr_prod,
            "curr_prod_indiv": self.curr_prod_indiv,
            "curr_inode": self.curr_inode,
            "curr_leaf": self.curr_leaf,
            "message_index": self.message_index,
            "visited_nodes": sorted(self.visited_nodes),
            "used_edges": sorted([list(edge) for edge in self.used_edges]),
        }


def new_context() -> ContextObject:
    return ContextObject()


@dataclass
class ResolutionOutcome:
    kind: str
    fired_rule: str = "none"
    payload: dict = field(default_factory=dict)
    sub_outcomes: list["ResolutionOutcome"] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "fired_rule": self.fired_rule, "payload": dict(self.payload)}
        if self.sub_outcomes:
            out["sub_outcomes"] = [s.to_dict() for s in self.sub_outcomes]
        return out


@dataclass
class ResolverDeps:
    """Immutable collaborators the resolver reads."""

    lexicon: Lexicon
    embeddings: EmbeddingTable | None = None
    similarity_threshold: float = matching.SIMILARITY_THRESHOLD
    ambiguity_margin: float = matching.AMBIGUITY_MARGIN
    intent_products: dict[str, str] = field(default_factory=dict)


# -- context bookkeeping --------------------------------------------------


def mark_visited(ctx: ContextObject, graph: OntologyGraph, node_id: str) -> ContextObject:
    if not graph.has_node(node_id):
        raise KeyError(f"unknown node id: {node_id}")
    if node_id in ctx.visited_nodes:
        return ctx
    return replace(ctx, visited_nodes=ctx.visited_nodes | {node_id})


def mark_used(ctx: ContextObject, graph: OntologyGraph, node_id: str, property_id: str) -> ContextObject:
    if not graph.has_node(node_id):
        raise KeyError(f"unknown node id: {node_id}")
    if property_id not in graph.data_properties:
        raise KeyError(f"unknown data property: {property_id}")
    return replace(ctx, used_edges=ctx.used_edges | {(node_id, property_id)})


def _remember(ctx: ContextObject, node_id: str) -> ContextObject:
    history = ctx.eoi_history + ((node_id, ctx.message_index),)
    if len(history) > EOI_HISTORY_LIMIT:
        history = history[-EOI_HISTORY_LIMIT:]
    return replace(ctx, eoi_history=history)


def recent_entities(ctx: ContextObject, graph: OntologyGraph) -> list[EntityOfInterest]:
    """Most recent first, with the role each node plays in the graph."""
    role_by_kind = {"class": "product", "individual": "individual", "data_property": "attribute"}
    out = []
    for node_id, _ in reversed(ctx.eoi_history):
        if graph.has_node(node_id):
            out.append(EntityOfInterest(node_id, role_by_kind[graph.node_kind(node_id)]))
    return out


def suggest_next(ctx: ContextObject, graph: OntologyGraph) -> tuple[str, str] | None:
    """First attribute of the focused product not yet used in this session."""
    subject = ctx.curr_prod_indiv or ctx.curr_prod
    if subject is None or not graph.has_node(subject):
        return None
    if graph.node_kind(subject) == "individual":
        class_id = graph.class_of_individual(subject)
    else:
        class_id = subject
    lineage = [class_id, *graph.ancestors(class_id)]
    applicable = sorted(
        prop.id
        for prop in graph.data_properties.values()
        if prop.domain in lineage and prop.suggestible
    )
    for prop_id in applicable:
        if (subject, prop_id) not in ctx.used_edges:
            return subject, prop_id
    return None


# -- resolution helpers ----------------------------------------------------


def _check_pointers(ctx: ContextObject, graph: OntologyGraph) -> None:
    for pointer in (ctx.curr_prod, ctx.curr_prod_indiv, ctx.curr_inode, ctx.curr_leaf):
        if pointer is not None and not graph.has_node(pointer):
            raise ContextStateError(f"context points at unknown node '{pointer}'")


def _match_noun_phrases(
    query: QueryObject, graph: OntologyGraph, deps: ResolverDeps
) -> list[tuple[str, list[MatchResult]]]:
    return [
        (np, match_phrase(deps.lexicon, graph, np, deps.embeddings, deps.similarity_threshold))
        for np in query.noun_phrases
    ]


def _is_root_class(graph: OntologyGraph, node_id: str) -> bool:
    return node_id in (graph.product_root, graph.service_root)


def _is_product_individual(graph: OntologyGraph, node_id: str) -> bool:
    return (
        graph.node_kind(node_id) == "individual"
        and graph.is_product_class(graph.class_of_individual(node_id))
    )


def _attribute_lemmas(
    query: QueryObject, graph: OntologyGraph, deps: ResolverDeps, consumed: set[str]
) -> list[str]:
    """Ordered lemmas in the query that name data properties: content verbs
    first, then noun phrases not already consumed by an entity match."""
    keys: list[str] = []
    for lemma in main_verb_lemmas(deps.lexicon, query.tokens):
        if lemma in keys:
            continue
        if any(graph.node_kind(n) == "data_property" for n in graph.lemma_index.get(lemma, [])):
            keys.append(lemma)
    for np in query.noun_phrases:
        if np in consumed:
            continue
        lemma = graph.phrase_lemma(np)
        if lemma in keys:
            continue
        if any(graph.node_kind(n) == "data_property" for n in graph.lemma_index.get(lemma, [])):
            keys.append(lemma)
    return keys


@dataclass(frozen=True)
class SubIntent:
    """One answerable unit of a (possibly compound) query."""

    product_class: str | None = None
    individual: str | None = None
    attribute_lemma: str | None = None


def split_intents(
    lex: Lexicon, query: QueryObject, graph: OntologyGraph, deps: ResolverDeps | None = None
) -> list[SubIntent]:
    """Break a query into its sub-resolutions: one product/individual focus
    plus one entry per questioned attribute. Single-intent queries come back
    as a singleton plan."""
    deps = deps or ResolverDeps(lexicon=lex)
    matches = _match_noun_phrases(query, graph, deps)
    individual = None
    product = None
    consumed: set[str] = set()
    for np, results in matches:
        if not results:
            continue
        top = results[0]
        if individual is None and _is_product_individual(graph, top.node_id):
            individual = top.node_id
            product = graph.class_of_individual(top.node_id)
            consumed.add(np)
        elif (
            product is None
            and graph.node_kind(top.node_id) == "class"
            and graph.is_product_class(top.node_id)
        ):
            product = top.node_id
            consumed.add(np)
    keys = _attribute_lemmas(query, graph, deps, consumed)
    if not keys:
        return [SubIntent(product_class=product, individual=individual)]
    return [
        SubIntent(product_class=product, individual=individual, attribute_lemma=key)
        for key in keys
    ]


def _fetch_attribute(
    ctx: ContextObject,
    graph: OntologyGraph,
    subject_id: str,
    key_lemma: str,
    rule: str,
    set_inode: bool = True,
) -> tuple[ResolutionOutcome, ContextObject] | None:
    hit = lookup_attribute_entry(graph, subject_id, key_lemma)
    if hit is None:
        return None
    prop_id, value = hit
    ctx = mark_visited(ctx, graph, subject_id)
    ctx = mark_used(ctx, graph, subject_id, prop_id)
    if set_inode and ctx.curr_inode != prop_id:
        ctx = replace(ctx, curr_inode=prop_id)
    outcome = ResolutionOutcome(
        kind="attribute_value",
        fired_rule=rule,
        payload={
            "subject": subject_id,
            "subject_label": graph.node_label(subject_id),
            "property": prop_id,
            "property_label": graph.node_label(prop_id),
            "value": value.value,
            "unit": value.unit,
            "rendered": value.render(),
        },
    )
    return outcome, ctx


def _fetch_many(
    ctx: ContextObject,
    graph: OntologyGraph,
    subjects: Iterable[str],
    keys: Iterable[str],
    rule: str,
) -> tuple[ResolutionOutcome, ContextObject]:
    subs: list[ResolutionOutcome] = []
    for subject in subjects:
        for key in keys:
            fetched = _fetch_attribute(ctx, graph, subject, key, rule)
            if fetched is None:
                continue
            outcome, ctx = fetched
            subs.append(outcome)
    if not subs:
        return ResolutionOutcome(kind="fallback", fired_rule=rule, payload={"reason": "no_attribute"}), ctx
    if len(subs) == 1:
        return subs[0], ctx
    return ResolutionOutcome(kind="composite", fired_rule=rule, sub_outcomes=subs), ctx


def _unvisited_offerings(ctx: ContextObject, graph: OntologyGraph) -> list[str]:
    if graph.product_root is None:
        return []
    return [
        cid
        for cid in subclasses(graph, graph.product_root, direct=True)
        if graph.is_product_class(cid) and cid not in ctx.visited_nodes
    ]


def _switch_to_class(
    ctx: ContextObject, graph: OntologyGraph, class_id: str
) -> tuple[ContextObject, list[str], str | None]:
    """Move the product focus. Returns (ctx, product subclasses, offered
    individual): exactly one individual below the class becomes the new
    curr_prod_indiv."""
    ctx = replace(ctx, curr_prod=class_id, curr_prod_indiv=None, curr_inode=None, curr_leaf=None)
    ctx = mark_visited(ctx, graph, class_id)
    ctx = _remember(ctx, class_id)
    product_subclasses = [
        cid for cid in subclasses(graph, class_id, direct=True) if graph.is_product_class(cid)
    ]
    if product_subclasses:
        return ctx, product_subclasses, None
    inds = individuals_of(graph, class_id, transitive=False)
    if len(inds) == 1:
        ctx = replace(ctx, curr_prod_indiv=inds[0])
        ctx = mark_visited(ctx, graph, inds[0])
        ctx = _remember(ctx, inds[0])
        return ctx, [], inds[0]
    return ctx, [], None


def _options_payload(graph: OntologyGraph, options: list[str], parent: str | None = None) -> dict:
    return {
        "options": list(options),
        "option_labels": [graph.node_label(o) for o in options],
        "parent": parent,
    }


# -- the rules -------------------------------------------------------------


def _rule_individual(
    ctx: ContextObject,
    query: QueryObject,
    graph: OntologyGraph,
    deps: ResolverDeps,
    np: str,
    individual_id: str,
) -> tuple[ResolutionOutcome, ContextObject]:
    class_id = graph.class_of_individual(individual_id)
    ctx = replace(
        ctx, curr_prod=class_id, curr_prod_indiv=individual_id, curr_inode=None, curr_leaf=None
    )
    ctx = mark_visited(ctx, graph, class_id)
    ctx = mark_visited(ctx, graph, individual_id)
    ctx = _remember(ctx, individual_id)
    keys = _attribute_lemmas(query, graph, deps, consumed={np})
    if keys:
        outcome, ctx = _fetch_many(ctx, graph, [individual_id], keys, rule="a")
        return outcome, ctx
    outcome = ResolutionOutcome(
        kind="context_switch",
        fired_rule="a",
        payload={
            "product": class_id,
            "product_label": graph.node_label(class_id),
            "individual": individual_id,
            "individual_label": graph.node_label(individual_id),
            "offered": True,
        },
    )
    return outcome, ctx


def _rule_class(
    ctx: ContextObject,
    query: QueryObject,
    graph: OntologyGraph,
    deps: ResolverDeps,
    np: str,
    class_id: str,
) -> tuple[ResolutionOutcome, ContextObject]:
    keys = _attribute_lemmas(query, graph, deps, consumed={np})

    same_focus = ctx.curr_prod_indiv is not None and (
        graph.class_of_individual(ctx.curr_prod_indiv) == class_id
        or graph.is_descendant_of(graph.class_of_individual(ctx.curr_prod_indiv), class_id)
    )
    if same_focus:
        # the class name refers to the individual already in focus
        if keys:
            return _fetch_many(ctx, graph, [ctx.curr_prod_indiv], keys, rule="b")
        outcome = ResolutionOutcome(
            kind="context_switch",
            fired_rule="b",
            payload={
                "product": ctx.curr_prod,
                "product_label": graph.node_label(ctx.curr_prod),
                "individual": ctx.curr_prod_indiv,
                "individual_label": graph.node_label(ctx.curr_prod_indiv),
                "offered": False,
            },
        )
        return outcome, ctx

    ctx, product_subclasses, offered = _switch_to_class(ctx, graph, class_id)
    if product_subclasses:
        options = [c for c in product_subclasses if c not in ctx.visited_nodes]
        outcome = ResolutionOutcome(
            kind="list_options", fired_rule="b", payload=_options_payload(graph, options, class_id)
        )
        return outcome, ctx
    if offered is not None:
        if keys:
            return _fetch_many(ctx, graph, [offered], keys, rule="b")
        outcome = ResolutionOutcome(
            kind="context_switch",
            fired_rule="b",
            payload={
                "product": class_id,
                "product_label": graph.node_label(class_id),
                "individual": offered,
                "individual_label": graph.node_label(offered),
                "offered": True,
            },
        )
        return outcome, ctx
    inds = individuals_of(graph, class_id, transitive=False)
    if len(inds) > 1:
        if keys:
            return _fetch_many(ctx, graph, inds, keys, rule="b")
        outcome = ResolutionOutcome(
            kind="list_options", fired_rule="b", payload=_options_payload(graph, inds, class_id)
        )
        return outcome, ctx
    if keys:
        return _fetch_many(ctx, graph, [class_id], keys, rule="b")
    outcome = ResolutionOutcome(
        kind="context_switch",
        fired_rule="b",
        payload={
            "product": class_id,
            "product_label": graph.node_label(class_id),
            "individual": None,
            "individual_label": None,
            "offered": False,
        },
    )
    return outcome, ctx


def _rule_root_listing(
    ctx: ContextObject, graph: OntologyGraph, root_id: str
) -> tuple[ResolutionOutcome, ContextObject]:
    options = [
        cid
        for cid in subclasses(graph, root_id, direct=True)
        if graph.is_product_class(cid) and cid not in ctx.visited_nodes
    ]
    if not options:
        outcome = ResolutionOutcome(
            kind="fallback", fired_rule="b", payload={"reason": "everything_discussed"}
        )
        return outcome, ctx
    outcome = ResolutionOutcome(
        kind="list_options", fired_rule="b", payload=_options_payload(graph, options, root_id)
    )
    return outcome, ctx


def _pronoun_referent(ctx: ContextObject, graph: OntologyGraph) -> str | None:
    if ctx.curr_prod_indiv is not None:
        return ctx.curr_prod_indiv
    if ctx.curr_prod is not None:
        return ctx.curr_prod
    for entity in recent_entities(ctx, graph):
        return entity.node_id
    return None


def _has_demonstrative(lex: Lexicon, query: QueryObject) -> bool:
    return any(t.pos_tag == "pronoun-demonstrative" for t in query.tokens)


def _has_verb(query: QueryObject) -> bool:
    return any(t.pos_tag == "verb" for t in query.tokens)


def resolve_pronoun(
    ctx: ContextObject, query: QueryObject, graph: OntologyGraph, deps: ResolverDeps | None = None
) -> ResolutionOutcome:
    """Resolve a bare demonstrative against the dialogue memory.

    The referent is the product individual in focus, else the product class,
    else the most recent entity mentioned; the questioned attribute comes
    from the main verb. Read-only: resolve() applies the bookkeeping.
    """
    deps = deps or ResolverDeps(lexicon=Lexicon())
    outcome, _ = _pronoun_transition(ctx, query, graph, deps)
    return outcome


def _pronoun_transition(
    ctx: ContextObject, query: QueryObject, graph: OntologyGraph, deps: ResolverDeps
) -> tuple[ResolutionOutcome, ContextObject]:
    referent = _pronoun_referent(ctx, graph)
    if referent is None:
        outcome = ResolutionOutcome(
            kind="clarify", fired_rule="pronoun", payload={"reason": "no_referent"}
        )
        return outcome, ctx
    keys = [
        lemma
        for lemma in main_verb_lemmas(deps.lexicon, query.tokens)
        if any(graph.node_kind(n) == "data_property" for n in graph.lemma_index.get(lemma, []))
    ]
    if not keys:
        outcome = ResolutionOutcome(
            kind="clarify",
            fired_rule="pronoun",
            payload={"reason": "no_attribute", "referent": referent},
        )
        return outcome, ctx
    fetched = _fetch_attribute(ctx, graph, referent, keys[0], rule="pronoun")
    if fetched is None:
        outcome = ResolutionOutcome(
            kind="clarify",
            fired_rule="pronoun",
            payload={"reason": "attribute_missing", "referent": referent, "attribute": keys[0]},
        )
        return outcome, ctx
    return fetched


def resolve_implicit(
    ctx: ContextObject, query: QueryObject, graph: OntologyGraph, deps: ResolverDeps | None = None
) -> ResolutionOutcome:
    """Resolve a noun phrase that names an attribute of the current product
    rather than a product: compound heads are located below the focus by
    breadth-first search, bare shorthands prefer the current inode subtree.
    Read-only: resolve() applies the bookkeeping."""
    deps = deps or ResolverDeps(lexicon=Lexicon())
    matches = _match_noun_phrases(query, graph, deps)
    candidate = _implicit_candidate(graph, matches)
    if candidate is None:
        return ResolutionOutcome(kind="fallback", fired_rule="implicit", payload={"reason": "no_match"})
    outcome, _ = _implicit_transition(ctx, query, graph, deps, *candidate)
    return outcome


def _implicit_candidate(
    graph: OntologyGraph, matches: list[tuple[str, list[MatchResult]]]
) -> tuple[str, MatchResult] | None:
    for np, results in matches:
        if not results:
            continue
        top = results[0]
        kind = graph.node_kind(top.node_id)
        if kind == "individual" and _is_product_individual(graph, top.node_id):
            continue
        if kind == "class" and (
            graph.is_product_class(top.node_id) or _is_root_class(graph, top.node_id)
        ):
            continue
        return np, top
    return None


def _search_anchors(ctx: ContextObject, graph: OntologyGraph) -> list[str]:
    if ctx.curr_prod_indiv is not None:
        return [graph.class_of_individual(ctx.curr_prod_indiv)]
    if ctx.curr_prod is not None:
        return [ctx.curr_prod]
    return [r for r in (graph.product_root, graph.service_root) if r is not None]


def _implicit_transition(
    ctx: ContextObject,
    query: QueryObject,
    graph: OntologyGraph,
    deps: ResolverDeps,
    np: str,
    match: MatchResult,
) -> tuple[ResolutionOutcome, ContextObject]:
    is_question = query.type_attr == "question"
    anchors = _search_anchors(ctx, graph)

    if match.tier == "compound":
        head_word = np.split()[-1]
        parts = nlu.split_compound(deps.lexicon, head_word)
        head_lemma = parts[-1]
        modifier_lemma = parts[-2] if len(parts) > 1 else None
        inode = None
        for anchor in anchors:
            inode = bfs_under(graph, anchor, head_lemma)
            if inode is not None:
                break
        if inode is None:
            outcome = ResolutionOutcome(
                kind="fallback", fired_rule="implicit", payload={"reason": "head_not_found", "head": head_lemma}
            )
            return outcome, ctx
        ctx = replace(ctx, curr_inode=inode, curr_leaf=None)
        ctx = mark_visited(ctx, graph, inode)
        ctx = _remember(ctx, inode)
        leaf = bfs_under(graph, inode, modifier_lemma) if modifier_lemma else None
        if leaf is not None:
            ctx = replace(ctx, curr_leaf=leaf)
            ctx = mark_visited(ctx, graph, leaf)
            ctx = _remember(ctx, leaf)
            outcome = ResolutionOutcome(
                kind="yes_no",
                fired_rule="implicit",
                payload={
                    "answer": True,
                    "evidence": leaf,
                    "evidence_label": graph.node_label(leaf),
                    "question": is_question,
                    "hint": _node_hint(graph, leaf),
                },
            )
            return outcome, ctx
        options = [c for c in graph.search_children(inode) if c not in ctx.visited_nodes]
        outcome = ResolutionOutcome(
            kind="yes_no",
            fired_rule="implicit",
            payload={
                "answer": False,
                "evidence": inode,
                "evidence_label": graph.node_label(inode),
                "question": is_question,
                **_options_payload(graph, options, inode),
            },
        )
        return outcome, ctx

    # bare shorthand: prefer the inode subtree, then the product subtree
    lemma = match.matched_lemma
    located = None
    under_inode = False
    if ctx.curr_inode is not None:
        located = bfs_under(graph, ctx.curr_inode, lemma)
        under_inode = located is not None
    if located is None:
        for anchor in anchors:
            located = bfs_under(graph, anchor, lemma)
            if located is not None:
                break
    if located is None:
        outcome = ResolutionOutcome(
            kind="fallback", fired_rule="implicit", payload={"reason": "not_found", "lemma": lemma}
        )
        return outcome, ctx

    if graph.node_kind(located) == "data_property":
        if under_inode and ctx.curr_inode is not None and graph.node_kind(ctx.curr_inode) == "class":
            subject = ctx.curr_inode
        else:
            subject = ctx.curr_prod_indiv or ctx.curr_prod or graph.data_properties[located].domain
        # a fetch below the current inode refines the leaf; the inode stays
        fetched = _fetch_attribute(ctx, graph, subject, lemma, rule="implicit", set_inode=not under_inode)
        if fetched is None:
            outcome = ResolutionOutcome(
                kind="clarify",
                fired_rule="implicit",
                payload={"reason": "attribute_missing", "attribute": located, "subject": subject},
            )
            return outcome, ctx
        outcome, ctx = fetched
        if under_inode:
            ctx = replace(ctx, curr_leaf=located)
        return outcome, ctx

    if under_inode:
        ctx = replace(ctx, curr_leaf=located)
    else:
        ctx = replace(ctx, curr_inode=located, curr_leaf=None)
    ctx = mark_visited(ctx, graph, located)
    ctx = _remember(ctx, located)
    outcome = ResolutionOutcome(
        kind="yes_no",
        fired_rule="implicit",
        payload={
            "answer": True,
            "evidence": located,
            "evidence_label": graph.node_label(located),
            "question": is_question,
            "hint": _node_hint(graph, located),
        },
    )
    return outcome, ctx


def _node_hint(graph: OntologyGraph, node_id: str) -> str | None:
    """Instructional text attached to a node, if the ontology carries one."""
    try:
        hit = lookup_attribute_entry(graph, node_id, "hinweis")
    except KeyError:
        return None
    return hit[1].render() if hit else None


def resolve(
    ctx: ContextObject,
    query: QueryObject,
    graph: OntologyGraph,
    deps: ResolverDeps,
    advance: bool = True,
) -> tuple[ResolutionOutcome, ContextObject]:
    """Run the context resolution algorithm for one query.

    `advance` increments the message counter; callers that split one user
    message into several queries advance only on the first.
    """
    _check_pointers(ctx, graph)
    if advance:
        ctx = replace(ctx, message_index=ctx.message_index + 1)

    # (0) greetings and chitchat short-circuit to answer generation
    if query.sentence_type == "Greeting":
        outcome = ResolutionOutcome(kind="greeting_echo", payload={"gtype": query.gtype or "opening"})
        return outcome, ctx
    if query.sentence_type == "Chitchat":
        return ResolutionOutcome(kind="chitchat_echo"), ctx

    matches = _match_noun_phrases(query, graph, deps)
    for np, results in matches:
        if is_ambiguous(results, deps.ambiguity_margin):
            options = [r.node_id for r in results[:2]]
            outcome = ResolutionOutcome(
                kind="clarify",
                fired_rule="none",
                payload={"reason": "ambiguous", "phrase": np, **_options_payload(graph, options)},
            )
            return outcome, ctx

    # (a) a product individual is named
    for np, results in matches:
        if results and _is_product_individual(graph, results[0].node_id):
            return _rule_individual(ctx, query, graph, deps, np, results[0].node_id)

    # (b) a product/service class (or the offering root) is named
    for np, results in matches:
        if results and graph.node_kind(results[0].node_id) == "class":
            node_id = results[0].node_id
            if graph.is_product_class(node_id):
                return _rule_class(ctx, query, graph, deps, np, node_id)
            if _is_root_class(graph, node_id):
                return _rule_root_listing(ctx, graph, node_id)

    # (pronoun) a bare demonstrative with a verb and a resolvable referent
    if (
        not query.noun_phrases
        and _has_demonstrative(deps.lexicon, query)
        and _has_verb(query)
        and _pronoun_referent(ctx, graph) is not None
    ):
        return _pronoun_transition(ctx, query, graph, deps)

    # (implicit) a noun phrase names an attribute concept of the focus
    candidate = _implicit_candidate(graph, matches)
    if candidate is not None:
        return _implicit_transition(ctx, query, graph, deps, *candidate)

    # closed world: a yes/no question about something the ontology lacks
    if (
        query.qtype == "yesno_q"
        and query.noun_phrases
        and all(not results for _, results in matches)
    ):
        options = _unvisited_offerings(ctx, graph)
        outcome = ResolutionOutcome(
            kind="yes_no",
            fired_rule="c",
            payload={
                "answer": False,
                "evidence": None,
                "question": True,
                **_options_payload(graph, options),
            },
        )
        return outcome, ctx

    # (d) the intent classifier names a product the words did not
    for label in query.intents:
        mapped = deps.intent_products.get(label)
        if mapped is not None and mapped in graph.classes:
            ctx, _, offered = _switch_to_class(ctx, graph, mapped)
            outcome = ResolutionOutcome(
                kind="context_switch",
                fired_rule="d",
                payload={
                    "product": mapped,
                    "product_label": graph.node_label(mapped),
                    "individual": offered,
                    "individual_label": graph.node_label(offered) if offered else None,
                    "offered": offered is not None,
                    "intent": label,
                },
            )
            return outcome, ctx

    # (c) nothing matched and no product is in focus: list what exists
    if ctx.curr_prod is None and ctx.curr_prod_indiv is None:
        options = _unvisited_offerings(ctx, graph)
        outcome = ResolutionOutcome(
            kind="no_product_prompt", fired_rule="c", payload=_options_payload(graph, options)
        )
        return outcome, ctx

    return ResolutionOutcome(kind="fallback", payload={"reason": "unresolved"}), ctx
