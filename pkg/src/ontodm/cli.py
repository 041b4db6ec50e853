"""Command line front end: chat REPL, HTTP server, script replay,
ontology validation and graph metrics."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .engine import ASSETS_DIR, Engine, EngineConfig
from .ontology import OntologyValidationError, load_ontology
from .replay import replay_script


def _engine_options(func):
    options = [
        click.option("--ontology", type=click.Path(path_type=Path), default=ASSETS_DIR / "ontology.json", show_default=True),
        click.option("--lexicon", type=click.Path(path_type=Path), default=ASSETS_DIR / "lexicon.tsv", show_default=True),
        click.option("--corpus", type=click.Path(path_type=Path), default=ASSETS_DIR / "corpus.txt", show_default=True),
        click.option("--embeddings", type=click.Path(path_type=Path), default=ASSETS_DIR / "embeddings.txt", show_default=True),
        click.option("--templates", type=click.Path(path_type=Path), default=ASSETS_DIR / "templates.txt", show_default=True),
        click.option("--transcript", type=click.Path(path_type=Path), default=None, help="Append turns to this JSONL file."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _build_engine(ontology, lexicon, corpus, embeddings, templates, transcript=None, port=8000) -> Engine:
    config = EngineConfig(
        ontology_path=ontology,
        lexicon_path=lexicon,
        corpus_path=corpus,
        embeddings_path=embeddings,
        templates_path=templates,
        transcript_path=transcript,
        port=port,
    )
    return Engine(config)


@click.group()
def main():
    """Ontology-driven banking dialogue engine."""


@main.command()
@_engine_options
def chat(ontology, lexicon, corpus, embeddings, templates, transcript):
    """Interactive chat REPL against a fresh session."""
    engine = _build_engine(ontology, lexicon, corpus, embeddings, templates, transcript)
    session_id = engine.create_session()
    click.echo("Verbunden. Leere Eingabe beendet den Chat.")
    while True:
        try:
            text = click.prompt("Sie", default="", show_default=False)
        except (EOFError, KeyboardInterrupt):
            break
        if not text.strip():
            break
        envelope = engine.post_message(session_id, text)
        state = envelope.state
        click.echo(f"Bot: {envelope.text}")
        click.echo(
            f"     [{envelope.outcome.fired_rule}/{envelope.outcome.kind}] "
            f"prod={state['curr_prod']} indiv={state['curr_prod_indiv']} "
            f"inode={state['curr_inode']} leaf={state['curr_leaf']} "
            f"msg={state['message_index']}"
        )


@main.command()
@_engine_options
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--static",
    type=click.Path(path_type=Path),
    default=None,
    help="Directory with the browser client bundle (served at /).",
)
def serve(ontology, lexicon, corpus, embeddings, templates, transcript, port, host, static):
    """Run the HTTP chat service."""
    import uvicorn

    from .api import create_app

    engine = _build_engine(ontology, lexicon, corpus, embeddings, templates, transcript, port)
    static_dir = static
    if static_dir is None:
        bundled = Path.cwd() / "frontend" / "dist"
        static_dir = bundled if bundled.is_dir() else None
    app = create_app(engine, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command()
@_engine_options
@click.option("--script", type=click.Path(path_type=Path), required=True)
def replay(ontology, lexicon, corpus, embeddings, templates, transcript, script):
    """Replay a scripted conversation and check its expectations."""
    engine = _build_engine(ontology, lexicon, corpus, embeddings, templates, transcript)
    report = replay_script(engine, script)
    for line in report.summary_lines():
        click.echo(line)
    sys.exit(0 if report.ok else 1)


@main.command()
@click.option("--ontology", type=click.Path(path_type=Path), default=ASSETS_DIR / "ontology.json", show_default=True)
def validate(ontology):
    """Validate an ontology document; exit 1 on violations."""
    try:
        graph = load_ontology(ontology)
    except OntologyValidationError as exc:
        click.echo("Ontology is invalid:")
        for violation in exc.violations:
            click.echo(f"  - {violation}")
        sys.exit(1)
    click.echo(
        f"OK: {len(graph.classes)} classes, {len(graph.individuals)} individuals, "
        f"{len(graph.object_properties)} object properties, "
        f"{len(graph.data_properties)} data properties"
    )


@main.command()
@click.option("--ontology", type=click.Path(path_type=Path), default=ASSETS_DIR / "ontology.json", show_default=True)
def metrics(ontology):
    """Print degree statistics of the ontology graph."""
    from .ontology import graph_metrics

    stats = graph_metrics(load_ontology(ontology))
    click.echo(f"average degree (undirected): {stats.avg_degree:.4g}")
    click.echo(f"max out-degree (object properties): {stats.max_out_degree}")
    click.echo(f"max in-degree (object properties): {stats.max_in_degree}")


if __name__ == "__main__":
    main()
