"""Command-line entry points."""

from __future__ import annotations

import json
import sys

import click

from .classify import DegenerateTrainingSet, load_model, save_model
from .config import ToolConfig
from .corpus import deduplicate, load_corpus, save_corpus
from .graphs import InvalidGraphError, SchemaError
from .loop import (
    SessionError,
    load_session,
    save_session,
    start_session,
    step_session,
    submit_labels,
)
from .reporting import build_report, save_report, train_from_session
from .selection import coverage


@click.group()
def main():
    """Mine discriminative API-usage patterns and detect misuses."""


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True))
@click.argument("out_path", type=click.Path())
@click.option("--threshold", type=float, default=0.7, show_default=True)
def ingest(corpus_path, out_path, threshold):
    """Load a corpus, drop code clones, write the deduplicated corpus."""
    try:
        corpus = load_corpus(corpus_path)
    except (SchemaError, InvalidGraphError) as exc:
        raise click.ClickException(str(exc))
    deduped = deduplicate(corpus, threshold)
    save_corpus(deduped, out_path)
    click.echo(
        f"loaded {len(corpus)} dropped-as-clones {len(corpus) - len(deduped)} kept {len(deduped)}"
    )


@main.group()
def session():
    """Drive the active-learning labeling session."""


@session.command("start")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--session", "session_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def session_start(corpus_path, session_path, seed, config_path):
    """Issue the initial random query batch."""
    cfg = ToolConfig.load(config_path)
    corpus = load_corpus(corpus_path)
    sess, event = start_session(
        corpus, corpus_path, selector_cfg=cfg.selector, miner_cfg=cfg.miner, seed=seed
    )
    save_session(sess, session_path)
    click.echo(f"batch of {len(event['payload']['ids'])} issued")
    for ex_id in event["payload"]["ids"]:
        click.echo(f"  {ex_id}")


@session.command("step")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--session", "session_path", required=True, type=click.Path(exists=True))
@click.option(
    "--labels",
    "labels_path",
    type=click.Path(exists=True),
    default=None,
    help="JSON file mapping example id -> C|M for the pending batch.",
)
def session_step(corpus_path, session_path, labels_path):
    """Consume submitted labels, update features, and issue the next batch."""
    corpus = load_corpus(corpus_path)
    sess = load_session(session_path)
    try:
        if labels_path:
            with open(labels_path, "r", encoding="utf-8") as fh:
                submit_labels(sess, json.load(fh))
        event = step_session(sess, corpus)
    except SessionError as exc:
        raise click.ClickException(str(exc))
    save_session(sess, session_path)
    if event["kind"] == "stopped":
        click.echo(f"stopped({event['payload']['reason']})")
    else:
        click.echo(f"batch of {len(event['payload']['ids'])} issued")


@session.command("status")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--session", "session_path", required=True, type=click.Path(exists=True))
def session_status(corpus_path, session_path):
    corpus = load_corpus(corpus_path)
    sess = load_session(session_path)
    cov = coverage(sess.selected_features, corpus)
    click.echo(
        f"iteration {sess.iteration} labeled {len(sess.labeled_ids)} "
        f"coverage {cov:.3f} features {len(sess.selected_features)} "
        f"pending {len(sess.pending_batch)} stopped {sess.stopped or '-'}"
    )


@main.command()
@click.option("--session", "session_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--model-out", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def train(session_path, corpus_path, model_out, seed, config_path):
    """Train the classifier + novelty detector from a finished session."""
    corpus = load_corpus(corpus_path)
    sess = load_session(session_path)
    try:
        model = train_from_session(sess, corpus, ToolConfig.load(config_path), seed=seed)
    except DegenerateTrainingSet:
        click.echo("degenerate training set", err=True)
        sys.exit(1)
    except SessionError as exc:
        raise click.ClickException(str(exc))
    save_model(model, model_out)
    click.echo(
        f"family {model.classifier['family']} cv_f1 {model.classifier['mean_f1']:.3f} "
        f"features {len(model.features)}"
    )


@main.command("classify")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--report-out", required=True, type=click.Path())
@click.option("--top-n", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
def classify_cmd(model_path, corpus_path, report_out, top_n, seed):
    """Classify every example in a corpus and write the report."""
    model = load_model(model_path)
    corpus = load_corpus(corpus_path)
    report = build_report(model, corpus, top_n=top_n, seed=seed)
    save_report(report, report_out)
    s = report["summary"]
    click.echo(f"correct {s['C']} misuse {s['M']} unknown {s['U']}")


@main.command()
@click.option("--session", "session_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--port", type=int, default=8321, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(session_path, corpus_path, port, config_path):
    """Serve the labeling UI API on localhost."""
    import uvicorn

    from .service import create_app

    app = create_app(session_path, corpus_path, ToolConfig.load(config_path))
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
