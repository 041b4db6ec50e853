"""Turn resolution outcomes into German surface answers via templates.

The template table is a plain config file so deployments can reword answers
without touching code. Rendering is total: a missing key falls back to a
generic template rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .context import ResolutionOutcome
from .nlu import QueryObject
from .ontology import OntologyGraph

DEFAULT_TEMPLATES = {
    "greeting_echo.opening": "Hallo! Wie kann ich Ihnen helfen?",
    "greeting_echo.closing": "Auf Wiedersehen! Bis zum nächsten Mal.",
    "chitchat_echo.any": "Gerne! Womit kann ich Ihnen weiterhelfen?",
    "attribute_value.any": "{property} für {product}: {value}.",
    "yes_no.true": "Ja. {evidence}",
    "yes_no.ack": "Gerne. {evidence}",
    "yes_no.false": "Nein, wir bieten nur {options} an.",
    "yes_no.false_leaf": "Nein, das ist leider nicht möglich. Möglich sind: {options}.",
    "list_options.any": "Wir bieten {options} an.",
    "no_product_prompt.any": "Wir bieten {options} an. Wofür interessieren Sie sich?",
    "context_switch.offer": "Wir bieten Ihnen {individual} an.",
    "context_switch.plain": "Gerne informiere ich Sie über {product}.",
    "clarify.no_referent": "Worauf beziehen Sie sich? Bitte nennen Sie das Produkt.",
    "clarify.ambiguous": "Meinten Sie {options}?",
    "clarify.any": "Das habe ich leider nicht verstanden. Können Sie das genauer beschreiben?",
    "fallback.any": "Dazu habe ich leider keine Information. Kann ich Ihnen anders helfen?",
    "suggestion.any": "Möchten Sie auch etwas über {property} erfahren?",
    "default.any": "Entschuldigung, darauf habe ich keine Antwort.",
}


class TemplateError(Exception):
    pass


@dataclass
class AnswerTemplates:
    patterns: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TEMPLATES))

    def lookup(self, kind: str, variant: str | None) -> str:
        for key in (f"{kind}.{variant}" if variant else None, f"{kind}.any", "default.any"):
            if key and key in self.patterns:
                return self.patterns[key]
        return DEFAULT_TEMPLATES["default.any"]


def load_templates(path: str | Path) -> AnswerTemplates:
    """Parse `kind.qualifier = pattern` lines; `#` lines are comments.
    File entries override the built-in defaults."""
    patterns = dict(DEFAULT_TEMPLATES)
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TemplateError(f"line {lineno}: expected 'kind.qualifier = pattern'")
        key, pattern = line.split("=", 1)
        key = key.strip()
        if "." not in key:
            raise TemplateError(f"line {lineno}: template key needs a qualifier: {key!r}")
        patterns[key] = pattern.strip()
    return AnswerTemplates(patterns)


@dataclass
class AnswerEnvelope:
    text: str
    outcome: ResolutionOutcome
    state: dict


def _join_options(labels: list[str]) -> str:
    if not labels:
        return ""
    if len(labels) == 1:
        return labels[0]
    return ", ".join(labels[:-1]) + " und " + labels[-1]


def _option_labels(graph: OntologyGraph | None, payload: dict, plural: bool) -> list[str]:
    options = payload.get("options", [])
    labels = []
    for node_id in options:
        if graph is not None and graph.has_node(node_id):
            if plural and node_id in graph.classes:
                labels.append(graph.plural_label(node_id))
            else:
                labels.append(graph.node_label(node_id))
        else:
            labels.append(str(node_id))
    return labels


def _capitalized(text: str) -> str:
    return text[:1].upper() + text[1:] if text else text


class AnswerGenerator:
    """Renders outcomes against a template table and the graph's labels."""

    def __init__(self, templates: AnswerTemplates | None = None, graph: OntologyGraph | None = None):
        self.templates = templates or AnswerTemplates()
        self.graph = graph

    def generate(
        self,
        outcome: ResolutionOutcome,
        query: QueryObject | None = None,
        suggestion: tuple[str, str] | None = None,
    ) -> str:
        if outcome.kind == "composite":
            parts = [self.generate(sub, query) for sub in outcome.sub_outcomes]
            return compose(parts)
        text = self._render(outcome, query)
        if suggestion is not None and outcome.kind == "attribute_value":
            text = compose([text, self._suggestion_text(suggestion)])
        return text

    def _suggestion_text(self, suggestion: tuple[str, str]) -> str:
        _, prop_id = suggestion
        if self.graph is not None and prop_id in self.graph.data_properties:
            prop = self.graph.data_properties[prop_id]
            if prop.prompt:
                return prop.prompt
            label = _capitalized(prop.label)
        else:
            label = prop_id
        return self.templates.lookup("suggestion", "any").format(property=label)

    def _render(self, outcome: ResolutionOutcome, query: QueryObject | None) -> str:
        payload = outcome.payload
        kind = outcome.kind

        if kind == "greeting_echo":
            return self.templates.lookup(kind, payload.get("gtype", "opening"))
        if kind == "chitchat_echo":
            return self.templates.lookup(kind, "any")

        if kind == "attribute_value":
            pattern = self.templates.lookup(kind, query.qtype if query else None)
            return pattern.format(
                property=_capitalized(str(payload.get("property_label", payload.get("property", "")))),
                product=payload.get("subject_label", payload.get("subject", "")),
                value=payload.get("rendered", ""),
                unit=payload.get("unit") or "",
            )

        if kind == "yes_no":
            if payload.get("answer"):
                variant = "true" if payload.get("question", True) else "ack"
                evidence = payload.get("hint") or (
                    f"{payload.get('evidence_label', '')} ist möglich."
                    if payload.get("evidence")
                    else ""
                )
                return self.templates.lookup(kind, variant).format(evidence=evidence).strip()
            variant = "false_leaf" if payload.get("evidence") else "false"
            labels = _option_labels(self.graph, payload, plural=(variant == "false"))
            if not labels:
                return "Nein."
            return self.templates.lookup(kind, variant).format(options=_join_options(labels))

        if kind in ("list_options", "no_product_prompt"):
            labels = _option_labels(self.graph, payload, plural=True)
            if not labels:
                return self.templates.lookup("fallback", "any")
            return self.templates.lookup(kind, "any").format(options=_join_options(labels))

        if kind == "context_switch":
            if payload.get("offered") and payload.get("individual_label"):
                return self.templates.lookup(kind, "offer").format(
                    individual=payload["individual_label"],
                    product=payload.get("product_label", ""),
                )
            return self.templates.lookup(kind, "plain").format(
                product=payload.get("product_label", payload.get("product", ""))
            )

        if kind == "clarify":
            reason = payload.get("reason")
            if reason == "ambiguous":
                labels = _option_labels(self.graph, payload, plural=False)
                return self.templates.lookup(kind, "ambiguous").format(options=_join_options(labels))
            if reason == "no_referent":
                return self.templates.lookup(kind, "no_referent")
            return self.templates.lookup(kind, "any")

        if kind == "fallback":
            return self.templates.lookup(kind, "any")

        return self.templates.lookup("default", "any")


def compose(sub_answers: list[str]) -> str:
    """Join sub-answers into one reply, order preserved."""
    if not sub_answers:
        raise ValueError("compose needs at least one sub-answer")
    return " ".join(part.strip() for part in sub_answers if part.strip())
